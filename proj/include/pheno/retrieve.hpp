#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "pheno/chunk.hpp"
#include "pheno/embed.hpp"

namespace pheno {

enum class Scorer { semantic, lexical };

struct ScoredChunk {
    long chunk_index = 0;
    double score = 0.0;  // semantic: [-1, 1]; lexical: >= 0
    Scorer scorer = Scorer::semantic;
};

struct RetrievalConfig {
    long token_threshold = 2500;
    int top_k = 10;
    long chunk_target_tokens = 400;
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
};

/// Finalized context for one note. When the note fits the token threshold,
/// retrieval is bypassed and context_text is the whole input.
struct ContextBundle {
    std::string note_id;
    std::vector<long> selected_indices;  // strictly increasing
    std::string context_text;
    bool bypassed = false;
};

/// Per-note chunk statistics for BM25: document frequencies are counted over
/// exactly the chunk set of one note.
struct CorpusStats {
    long num_chunks = 0;
    double avg_len = 0.0;
    std::unordered_map<std::string, long> doc_freq;  // case-folded term -> chunks containing it

    static CorpusStats from_chunks(const std::vector<Chunk>& chunks);
};

/// dot(a,b) / (|a| |b|). Throws std::invalid_argument on dimension mismatch
/// or a zero-norm input.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Okapi BM25 with IDF(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). Terms match
/// on the case-folded proxy tokenization; absent terms contribute 0.
double bm25_score(const std::vector<std::string>& query_terms, const Chunk& chunk, const CorpusStats& stats,
                  double k1 = 0.9, double b = 0.4);

// Per-chunk scores for one query. Zero-norm embeddings score 0 rather than
// erroring; semantic scores are clamped to [-1, 1].
std::vector<double> semantic_scores(const std::string& query, const std::vector<Chunk>& chunks,
                                    const Embedder& embedder);
std::vector<double> lexical_scores(const std::string& query, const std::vector<Chunk>& chunks,
                                   const CorpusStats& stats, const RetrievalConfig& cfg);

/// Top k chunks by descending score, ties broken by lower chunk index.
std::vector<ScoredChunk> top_k_chunks(const std::vector<double>& scores, Scorer scorer, int k);

std::vector<ScoredChunk> semantic_topk(const std::string& query, const std::vector<Chunk>& chunks,
                                       const Embedder& embedder, int k);
std::vector<ScoredChunk> lexical_topk(const std::string& query, const std::vector<Chunk>& chunks,
                                      const CorpusStats& stats, int k, const RetrievalConfig& cfg = {});

/// Hybrid retrieval for one note: bypass under the token threshold, otherwise
/// split, score each chunk by its max over the queries per scorer, union the
/// two top-k index sets, restore original order, and join with "\n" under the
/// token budget (highest-index selected chunks dropped first).
ContextBundle retrieve(const std::string& diff_text, const std::vector<std::string>& queries,
                       const Embedder& embedder, const RetrievalConfig& cfg);

}  // namespace pheno
