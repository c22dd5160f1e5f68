#include "pheno/chunk.hpp"

#include <array>
#include <string_view>

#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

constexpr std::array<std::string_view, 4> kSeparators = {"\n\n", "\n", ". ", " "};

// Splits range at every separator occurrence, separator attached to the
// preceding piece. A range without the separator comes back whole.
std::vector<std::string_view> split_keep_separator(std::string_view range, std::string_view sep) {
    std::vector<std::string_view> pieces;
    size_t pos = 0;
    while (pos < range.size()) {
        size_t hit = range.find(sep, pos);
        if (hit == std::string_view::npos) {
            pieces.push_back(range.substr(pos));
            break;
        }
        pieces.push_back(range.substr(pos, hit + sep.size() - pos));
        pos = hit + sep.size();
    }
    if (pieces.empty()) pieces.push_back(range);
    return pieces;
}

void split_rec(std::string_view range, long target, size_t level, std::vector<std::string_view>& out) {
    if (count_tokens(range) <= target || level == kSeparators.size()) {
        out.push_back(range);
        return;
    }
    auto pieces = split_keep_separator(range, kSeparators[level]);
    if (pieces.size() == 1) {
        split_rec(range, target, level + 1, out);
        return;
    }

    // Greedy merge of adjacent pieces up to the target; oversized pieces
    // recurse at the next separator level.
    std::string_view acc{};
    auto extend = [&](std::string_view piece) {
        if (acc.empty()) return piece;
        return std::string_view(acc.data(), (piece.data() + piece.size()) - acc.data());
    };
    auto flush = [&] {
        if (!acc.empty()) out.push_back(acc);
        acc = {};
    };
    for (auto piece : pieces) {
        if (count_tokens(piece) > target) {
            flush();
            split_rec(piece, target, level + 1, out);
            continue;
        }
        std::string_view merged = extend(piece);
        if (count_tokens(merged) > target) {
            flush();
            acc = piece;
        } else {
            acc = merged;
        }
    }
    flush();
}

}  // namespace

std::vector<Chunk> recursive_split(const std::string& text, long target_tokens) {
    std::vector<Chunk> chunks;
    if (text.empty()) return chunks;
    std::vector<std::string_view> ranges;
    split_rec(text, target_tokens, 0, ranges);
    chunks.reserve(ranges.size());
    for (size_t i = 0; i < ranges.size(); ++i)
        chunks.push_back(Chunk{static_cast<long>(i), std::string(ranges[i]), count_tokens(ranges[i])});
    return chunks;
}

}  // namespace pheno
