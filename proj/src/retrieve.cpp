#include "pheno/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pheno/tokenize.hpp"

namespace pheno {

CorpusStats CorpusStats::from_chunks(const std::vector<Chunk>& chunks) {
    CorpusStats stats;
    stats.num_chunks = static_cast<long>(chunks.size());
    long total_len = 0;
    for (const auto& chunk : chunks) {
        total_len += chunk.token_count;
        std::set<std::string> seen;
        for (auto token : tokenize(chunk.text)) seen.insert(fold_case(token));
        for (const auto& term : seen) ++stats.doc_freq[term];
    }
    stats.avg_len = stats.num_chunks ? static_cast<double>(total_len) / stats.num_chunks : 0.0;
    return stats;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

double norm(const EmbeddingVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double guarded_cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("embedder returned vectors of mismatched dimension");
    double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

}  // namespace

double bm25_score(const std::vector<std::string>& query_terms, const Chunk& chunk, const CorpusStats& stats,
                  double k1, double b) {
    std::unordered_map<std::string, long> tf;
    for (auto token : tokenize(chunk.text)) ++tf[fold_case(token)];

    double score = 0.0;
    for (const auto& term : query_terms) {
        auto tf_it = tf.find(term);
        if (tf_it == tf.end()) continue;
        double f = static_cast<double>(tf_it->second);
        auto df_it = stats.doc_freq.find(term);
        double df = df_it == stats.doc_freq.end() ? 0.0 : static_cast<double>(df_it->second);
        double idf = std::log(1.0 + (stats.num_chunks - df + 0.5) / (df + 0.5));
        double len_norm = stats.avg_len > 0.0 ? chunk.token_count / stats.avg_len : 1.0;
        score += idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * len_norm));
    }
    return score;
}

std::vector<double> semantic_scores(const std::string& query, const std::vector<Chunk>& chunks,
                                    const Embedder& embedder) {
    std::vector<std::string> texts;
    texts.reserve(chunks.size() + 1);
    texts.push_back(query);
    for (const auto& chunk : chunks) texts.push_back(chunk.text);
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) throw EmbedderError("embedder returned wrong vector count");

    std::vector<double> scores(chunks.size());
    for (size_t i = 0; i < chunks.size(); ++i) scores[i] = guarded_cosine(vectors[0], vectors[i + 1]);
    return scores;
}

std::vector<double> lexical_scores(const std::string& query, const std::vector<Chunk>& chunks,
                                   const CorpusStats& stats, const RetrievalConfig& cfg) {
    std::vector<std::string> terms;
    for (auto token : tokenize(query)) terms.push_back(fold_case(token));
    std::vector<double> scores(chunks.size());
    for (size_t i = 0; i < chunks.size(); ++i)
        scores[i] = bm25_score(terms, chunks[i], stats, cfg.bm25_k1, cfg.bm25_b);
    return scores;
}

std::vector<ScoredChunk> top_k_chunks(const std::vector<double>& scores, Scorer scorer, int k) {
    std::vector<long> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    size_t take = std::min<size_t>(static_cast<size_t>(std::max(k, 0)), order.size());
    std::vector<ScoredChunk> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(ScoredChunk{order[i], scores[order[i]], scorer});
    return out;
}

std::vector<ScoredChunk> semantic_topk(const std::string& query, const std::vector<Chunk>& chunks,
                                       const Embedder& embedder, int k) {
    if (chunks.empty()) throw std::invalid_argument("semantic_topk: empty chunk set");
    return top_k_chunks(semantic_scores(query, chunks, embedder), Scorer::semantic, k);
}

std::vector<ScoredChunk> lexical_topk(const std::string& query, const std::vector<Chunk>& chunks,
                                      const CorpusStats& stats, int k, const RetrievalConfig& cfg) {
    if (chunks.empty()) throw std::invalid_argument("lexical_topk: empty chunk set");
    return top_k_chunks(lexical_scores(query, chunks, stats, cfg), Scorer::lexical, k);
}

ContextBundle retrieve(const std::string& diff_text, const std::vector<std::string>& queries,
                       const Embedder& embedder, const RetrievalConfig& cfg) {
    if (diff_text.empty()) throw std::invalid_argument("retrieve: empty diff_text");
    if (queries.empty()) throw std::invalid_argument("retrieve: no queries");
    if (cfg.top_k < 1) throw std::invalid_argument("retrieve: top_k must be >= 1");
    if (cfg.token_threshold <= cfg.chunk_target_tokens)
        throw std::invalid_argument("retrieve: token_threshold must exceed chunk_target_tokens");

    ContextBundle bundle;
    if (count_tokens(diff_text) <= cfg.token_threshold) {
        bundle.bypassed = true;
        bundle.context_text = diff_text;
        return bundle;
    }

    auto chunks = recursive_split(diff_text, cfg.chunk_target_tokens);
    auto stats = CorpusStats::from_chunks(chunks);

    // One embedding call for queries and chunks together.
    std::vector<std::string> texts(queries);
    for (const auto& chunk : chunks) texts.push_back(chunk.text);
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) throw EmbedderError("embedder returned wrong vector count");

    // Per-chunk score = max over queries, per scorer.
    std::vector<double> semantic(chunks.size(), std::numeric_limits<double>::lowest());
    std::vector<double> lexical(chunks.size(), std::numeric_limits<double>::lowest());
    for (size_t q = 0; q < queries.size(); ++q) {
        std::vector<std::string> terms;
        for (auto token : tokenize(queries[q])) terms.push_back(fold_case(token));
        for (size_t c = 0; c < chunks.size(); ++c) {
            semantic[c] = std::max(semantic[c], guarded_cosine(vectors[q], vectors[queries.size() + c]));
            lexical[c] = std::max(lexical[c], bm25_score(terms, chunks[c], stats, cfg.bm25_k1, cfg.bm25_b));
        }
    }

    std::set<long> selected;
    for (const auto& sc : top_k_chunks(semantic, Scorer::semantic, cfg.top_k)) selected.insert(sc.chunk_index);
    for (const auto& sc : top_k_chunks(lexical, Scorer::lexical, cfg.top_k)) selected.insert(sc.chunk_index);

    bundle.selected_indices.assign(selected.begin(), selected.end());

    auto join = [&](const std::vector<long>& indices) {
        std::string text;
        for (size_t i = 0; i < indices.size(); ++i) {
            if (i) text += '\n';
            text += chunks[indices[i]].text;
        }
        return text;
    };
    bundle.context_text = join(bundle.selected_indices);
    while (!bundle.selected_indices.empty() && count_tokens(bundle.context_text) > cfg.token_threshold) {
        bundle.selected_indices.pop_back();
        bundle.context_text = join(bundle.selected_indices);
    }
    return bundle;
}

}  // namespace pheno
