#include "pheno/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pheno/baseline.hpp"
#include "pheno/preprocess.hpp"
#include "pheno/retrieve.hpp"
#include "pheno/store.hpp"
#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file: " + path.string());
    std::vector<T> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(std::string(what) + " line " + std::to_string(lineno) + ": invalid JSON");
        out.push_back(j.get<T>());
    }
    return out;
}

}  // namespace

std::vector<ClinicalNote> read_note_corpus(const std::filesystem::path& path) {
    return read_jsonl<ClinicalNote>(path, "corpus");
}

std::vector<ProcessedNote> read_processed_corpus(const std::filesystem::path& path) {
    return read_jsonl<ProcessedNote>(path, "processed corpus");
}

std::vector<GoldLabel> read_gold_labels(const std::filesystem::path& path) {
    return read_jsonl<GoldLabel>(path, "gold labels");
}

void write_processed_corpus(const std::filesystem::path& path, const std::vector<ProcessedNote>& notes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    for (const auto& note : notes) out << json(note).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

PreprocessSummary cmd_preprocess(const std::filesystem::path& in_corpus, const std::filesystem::path& out_path,
                                 const PipelineConfig& cfg) {
    auto notes = read_note_corpus(in_corpus);
    auto processed = process_differential(notes, cfg.section_filter);

    PreprocessSummary summary;
    summary.notes = static_cast<long>(processed.size());
    double total_reduction = 0.0;
    for (size_t i = 0; i < notes.size(); ++i)
        total_reduction += static_cast<double>(count_tokens(notes[i].raw_text) - processed[i].token_count);
    summary.mean_token_reduction = processed.empty() ? 0.0 : total_reduction / processed.size();

    write_processed_corpus(out_path, processed);
    return summary;
}

ExtractSummary cmd_extract(const std::filesystem::path& in_path, ExtractorChoice choice, const PipelineConfig& cfg,
                           GenerationBackend* backend, const Embedder* embedder) {
    auto notes = read_processed_corpus(in_path);
    AnnotationStore store(cfg.store_path);
    ExtractSummary summary;
    summary.notes = static_cast<long>(notes.size());

    auto timestamp = [&] { return cfg.fixed_timestamp.empty() ? iso_utc_now() : cfg.fixed_timestamp; };

    if (choice == ExtractorChoice::baseline) {
        BaselineConfig bcfg;
        auto records = baseline_extract_corpus(notes, bcfg, timestamp());
        for (size_t i = 0; i < records.size(); ++i) {
            if (records[i]) {
                store.append_record(*records[i]);
            } else {
                store.append_no_response(notes[i].note_id, "baseline");
                ++summary.no_response_notes;
            }
        }
        return summary;
    }

    if (!backend || !embedder) throw std::invalid_argument("llm extraction requires a backend and an embedder");

    std::vector<std::string> queries;
    for (QueryKind kind : all_query_kinds()) queries.push_back(canonical_query(kind).text);

    std::atomic<size_t> next{0};
    std::atomic<long> no_responses{0}, partials{0};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < notes.size(); i = next.fetch_add(1)) {
            const ProcessedNote& note = notes[i];
            try {
                auto skip_with = [&](const char* reason) {
                    PhenotypeRecord rec;
                    rec.note_id = note.note_id;
                    rec.extractor_id = backend->identity();
                    rec.extracted_at = timestamp();
                    rec.provenance.push_back(reason);
                    store.append_record(rec);
                };
                if (note.diff_text.empty()) {
                    // Fully deduplicated note: nothing new to extract.
                    skip_with("empty diff_text; extraction skipped");
                    continue;
                }
                ContextBundle bundle = retrieve(note.diff_text, queries, *embedder, cfg.retrieval);
                bundle.note_id = note.note_id;
                if (bundle.context_text.empty()) {
                    // budget truncation can empty the context when a single
                    // unsplittable chunk exceeds the whole token budget
                    skip_with("retrieval produced an empty context; extraction skipped");
                    continue;
                }
                AuditSink sink = [&](const AttemptAudit& audit) {
                    store.append_audit(audit, backend->identity());
                };
                NoteExtraction result =
                    extract_note(*backend, note.note_id, bundle.context_text, cfg.generation, timestamp(), sink);
                if (result.failed_queries.size() == all_query_kinds().size()) {
                    store.append_no_response(note.note_id, backend->identity());
                    ++no_responses;
                } else {
                    store.append_record(result.record, {result.failed_queries.begin(),
                                                        result.failed_queries.end()});
                    if (!result.failed_queries.empty()) ++partials;
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty()) first_error = std::string("note ") + note.note_id + ": " + e.what();
            }
        }
    };

    int n_workers = std::max(1, std::min<int>(cfg.concurrency_limit, static_cast<int>(notes.size())));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);

    summary.no_response_notes = no_responses;
    summary.partial_failures = partials;
    return summary;
}

std::string cmd_eval(const std::filesystem::path& store_path, const std::filesystem::path& gold_path) {
    auto replay = AnnotationStore::replay(store_path);
    if (replay.rows.empty()) throw std::runtime_error("store holds no extraction rows: " + store_path.string());
    auto gold = read_gold_labels(gold_path);
    if (gold.empty()) throw std::runtime_error("gold label file is empty: " + gold_path.string());
    std::string out;
    for (const auto& warning : replay.warnings) out += "warning: " + warning + "\n";
    return out + render_report(evaluate_rows(replay.rows, gold));
}

std::string cmd_tokens(const std::filesystem::path& in_corpus, long token_threshold) {
    auto notes = read_note_corpus(in_corpus);
    if (notes.empty()) throw std::runtime_error("corpus is empty: " + in_corpus.string());

    constexpr long kBucket = 500;
    std::vector<long> counts;
    long over = 0;
    for (const auto& note : notes) {
        long tokens = count_tokens(note.raw_text);
        size_t bucket = static_cast<size_t>(tokens / kBucket);
        if (counts.size() <= bucket) counts.resize(bucket + 1, 0);
        ++counts[bucket];
        if (tokens > token_threshold) ++over;
    }

    long max_count = 1;
    for (long c : counts) max_count = std::max(max_count, c);

    std::ostringstream out;
    out << "Token-length distribution (" << notes.size() << " notes, bucket " << kBucket << " tokens)\n";
    for (size_t b = 0; b < counts.size(); ++b) {
        long lo = static_cast<long>(b) * kBucket;
        char label[40];
        std::snprintf(label, sizeof(label), "%6ld-%-6ld", lo, lo + kBucket - 1);
        out << label << " " << std::string(6 - std::to_string(counts[b]).size(), ' ') << counts[b] << "  ";
        int bar = static_cast<int>(50.0 * counts[b] / max_count);
        out << std::string(bar, '#') << "\n";
    }
    char frac[64];
    std::snprintf(frac, sizeof(frac), "%.2f%%", 100.0 * over / notes.size());
    out << "notes over " << token_threshold << " tokens: " << over << " (" << frac << ")\n";
    return out.str();
}

}  // namespace pheno
