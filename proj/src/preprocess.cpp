#include "pheno/preprocess.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

std::string_view trim(std::string_view s) {
    size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// "" -> no lines; otherwise '\n'-separated, keeping empty segments so that
// join(split(text)) == text.
std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    if (text.empty()) return lines;
    size_t pos = 0;
    while (true) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

std::string drop_non_ascii(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (static_cast<unsigned char>(c) < 0x80) out += c;
    return out;
}

// Which configured header starts at this line, if any.
const std::string* matched_header(std::string_view line, const SectionFilterConfig& cfg) {
    std::string folded = fold_case(trim(line));
    for (const auto& header : cfg.drop_section_headers) {
        if (folded == header) return &header;
        if (folded.size() > header.size() && folded.compare(0, header.size(), header) == 0 &&
            folded[header.size()] == ':')
            return &header;
    }
    return nullptr;
}

// A "Label:" line: letters/spaces (no digits) before a colon. These terminate
// a dropped block even when the label is not itself configured.
bool is_header_line(std::string_view line) {
    std::string_view t = trim(line);
    size_t colon = t.find(':');
    if (colon == 0 || colon == std::string_view::npos || colon > 40) return false;
    for (char c : t.substr(0, colon)) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == ' ' || c == '/' || c == '&' || c == '-' ||
                  c == '\'';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

StripResult strip_sections(const std::string& raw_text, const SectionFilterConfig& cfg) {
    StripResult result;
    auto lines = split_lines(drop_non_ascii(raw_text));
    std::vector<std::string> kept;
    bool dropping = false;
    for (const auto& line : lines) {
        if (const std::string* header = matched_header(line, cfg)) {
            result.removed.push_back(*header);
            dropping = true;
            continue;
        }
        if (dropping && is_header_line(line)) dropping = false;
        if (!dropping) kept.push_back(line);
    }
    result.clean_text = join_lines(kept);
    return result;
}

std::string rm_dups(const std::string& prev_text, const std::string& curr_text) {
    std::unordered_set<std::string> seen;
    for (const auto& line : split_lines(prev_text)) seen.insert(std::string(trim(line)));

    std::vector<std::string> kept;
    for (const auto& line : split_lines(curr_text))
        if (!seen.count(std::string(trim(line)))) kept.push_back(line);
    return join_lines(kept);
}

std::vector<ProcessedNote> process_differential(const std::vector<ClinicalNote>& notes,
                                                const SectionFilterConfig& cfg) {
    auto key = [](const ClinicalNote& n) { return std::tie(n.patient_id, n.visit_date, n.note_id); };
    for (size_t i = 1; i < notes.size(); ++i)
        if (key(notes[i]) < key(notes[i - 1]))
            throw std::invalid_argument("notes not sorted by (patient_id, visit_date, note_id) at row " +
                                        std::to_string(i));

    std::vector<ProcessedNote> out;
    out.reserve(notes.size());
    std::vector<std::string> stripped(notes.size());
    for (size_t r = 0; r < notes.size(); ++r) {
        StripResult sr = strip_sections(notes[r].raw_text, cfg);
        stripped[r] = std::move(sr.clean_text);

        bool patient_boundary = r == 0 || notes[r].patient_id != notes[r - 1].patient_id;
        std::string diff;
        if (patient_boundary) {
            diff = stripped[r];
        } else {
            diff = rm_dups(stripped[r - 1], stripped[r]);
            // Nothing removed: retry against the note two back, same patient only.
            if (diff == stripped[r] && r >= 2 && notes[r - 2].patient_id == notes[r].patient_id)
                diff = rm_dups(stripped[r - 2], stripped[r]);
        }

        ProcessedNote pn;
        pn.note_id = notes[r].note_id;
        pn.token_count = count_tokens(diff);
        pn.diff_text = std::move(diff);
        pn.removed_sections = std::move(sr.removed);
        out.push_back(std::move(pn));
    }
    return out;
}

}  // namespace pheno
