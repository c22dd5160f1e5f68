#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pheno {

using EmbeddingVector = std::vector<double>;

struct EmbedderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Batch text embedder. Implementations must return one vector per input, in
/// input order, all of one fixed dimension, and must either be safe for
/// concurrent calls or be wrapped by the caller.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const = 0;
};

/// Deterministic feature-hashed bag-of-words embedder. A stand-in for a real
/// embedding model in offline runs and tests: tokens are case-folded, hashed
/// (FNV-1a) into `dimension` signed buckets, and the vector is L2-normalized.
/// Text with no tokens maps to the unit vector on component 0.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(size_t dimension = 256) : dimension_(dimension) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

    size_t dimension() const { return dimension_; }

private:
    size_t dimension_;
};

/// Client for the embedding endpoint wire contract:
/// POST {"texts": [...]} -> {"vectors": [[...], ...]}, order-preserving.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(std::string url, int timeout_seconds = 120)
        : url_(std::move(url)), timeout_seconds_(timeout_seconds) {}

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

private:
    std::string url_;
    int timeout_seconds_;
};

}  // namespace pheno
