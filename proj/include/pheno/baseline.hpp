#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pheno/core.hpp"

namespace pheno {

/// Tuning for the pattern-based baseline extractor. The fault-injection
/// fields simulate the upstream annotation API occasionally returning
/// nothing; off by default and applied per-corpus so the failure count is
/// exact and seeded.
struct BaselineConfig {
    int window_tokens = 5;  // max keyword-to-value distance
    long fault_numerator = 0;
    long fault_denominator = 1;
    uint64_t fault_seed = 0;
};

Biomarkers extract_biomarkers(const std::string& text, const BaselineConfig& cfg = {});
TNM extract_tnm(const std::string& text);
std::optional<Stage> extract_stage(const std::string& text, const BaselineConfig& cfg = {});
GradePerformance extract_grade_perf(const std::string& text, const BaselineConfig& cfg = {});
std::vector<TumorFinding> extract_tumors(const std::string& text, const BaselineConfig& cfg = {});
std::optional<bool> extract_metastasis_flag(const std::string& text);

/// Composes the five extractors over one processed note. Returns nullopt (a
/// no-response) only when inject_fault is set.
std::optional<PhenotypeRecord> baseline_extract(const ProcessedNote& note, const BaselineConfig& cfg = {},
                                                const std::string& extracted_at = "", bool inject_fault = false);

/// Corpus pass with exact-count fault injection: of N notes, exactly
/// N * fault_numerator / fault_denominator are no-responses, chosen by a
/// seeded shuffle.
std::vector<std::optional<PhenotypeRecord>> baseline_extract_corpus(const std::vector<ProcessedNote>& notes,
                                                                    const BaselineConfig& cfg = {},
                                                                    const std::string& extracted_at = "");

}  // namespace pheno
