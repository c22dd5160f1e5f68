#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pheno/core.hpp"

namespace pheno {

/// Section headers whose blocks are dropped before any other processing.
/// Headers are matched case-insensitively against each line: the trimmed
/// line either equals the header or starts with "<header>:".
struct SectionFilterConfig {
    std::vector<std::string> drop_section_headers = {"physical examination", "current medications", "vitals",
                                                     "vital signs", "allergies"};
};

struct StripResult {
    std::string clean_text;
    std::vector<std::string> removed;  // configured headers actually matched, in order
};

/// Removes non-ASCII bytes, then drops every block that starts at a configured
/// header line and runs up to the next recognized header line (any
/// "Label:"-shaped line) or end of text.
StripResult strip_sections(const std::string& raw_text, const SectionFilterConfig& cfg);

/// Removes every line of curr_text whose trimmed content appears verbatim as
/// a trimmed line of prev_text. Line order is preserved.
std::string rm_dups(const std::string& prev_text, const std::string& curr_text);

/// Differential-text pass over a corpus sorted by (patient_id, visit_date,
/// note_id). The first note of each patient keeps its full stripped text;
/// later notes are deduplicated against the previous note, falling back to
/// the note two back (same patient only) when nothing was removed.
/// Throws std::invalid_argument on unsorted input.
std::vector<ProcessedNote> process_differential(const std::vector<ClinicalNote>& notes,
                                                const SectionFilterConfig& cfg);

}  // namespace pheno
