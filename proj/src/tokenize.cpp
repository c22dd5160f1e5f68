#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

inline bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_word(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c >= 0x80;
}

// printable ASCII that is neither alphanumeric nor whitespace
inline bool is_punct(unsigned char c) { return c >= 0x21 && c <= 0x7e && !is_word(c); }

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    size_t start = std::string_view::npos;
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word(c)) {
            if (start == std::string_view::npos) start = i;
            continue;
        }
        if (start != std::string_view::npos) {
            tokens.push_back(text.substr(start, i - start));
            start = std::string_view::npos;
        }
        if (is_punct(c)) tokens.push_back(text.substr(i, 1));
    }
    if (start != std::string_view::npos) tokens.push_back(text.substr(start));
    return tokens;
}

long count_tokens(std::string_view text) {
    long n = 0;
    bool in_word = false;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (is_word(c)) {
            if (!in_word) ++n;
            in_word = true;
            continue;
        }
        in_word = false;
        if (is_punct(c)) ++n;
    }
    return n;
}

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return out;
}

}  // namespace pheno
