#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pheno/config.hpp"
#include "pheno/embed.hpp"
#include "pheno/evaluate.hpp"
#include "pheno/llm.hpp"

namespace pheno {

// JSON-lines corpus IO
std::vector<ClinicalNote> read_note_corpus(const std::filesystem::path& path);
std::vector<ProcessedNote> read_processed_corpus(const std::filesystem::path& path);
std::vector<GoldLabel> read_gold_labels(const std::filesystem::path& path);
void write_processed_corpus(const std::filesystem::path& path, const std::vector<ProcessedNote>& notes);

struct PreprocessSummary {
    long notes = 0;
    double mean_token_reduction = 0.0;
};

/// strip_sections + process_differential over a raw corpus file; writes the
/// ProcessedNote JSON-lines output.
PreprocessSummary cmd_preprocess(const std::filesystem::path& in_corpus, const std::filesystem::path& out_path,
                                 const PipelineConfig& cfg);

enum class ExtractorChoice { llm, baseline };

struct ExtractSummary {
    long notes = 0;
    long no_response_notes = 0;   // all queries failed (llm) or injected fault (baseline)
    long partial_failures = 0;    // some but not all queries failed
};

/// Full extraction over a processed corpus into the annotation store. The llm
/// path runs retrieve -> extract_note per note; the baseline path skips
/// retrieval and generation entirely. backend/embedder may be null for the
/// baseline path.
ExtractSummary cmd_extract(const std::filesystem::path& in_path, ExtractorChoice choice, const PipelineConfig& cfg,
                           GenerationBackend* backend, const Embedder* embedder);

/// Joins the store against gold labels and renders the two report tables.
std::string cmd_eval(const std::filesystem::path& store_path, const std::filesystem::path& gold_path);

/// Token-length histogram of a raw corpus, with the fraction of notes over
/// the retrieval threshold.
std::string cmd_tokens(const std::filesystem::path& in_corpus, long token_threshold);

}  // namespace pheno
