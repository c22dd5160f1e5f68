#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "pheno/core.hpp"
#include "pheno/schema.hpp"

namespace pheno {

/// One of the four fixed extraction queries, with its canonical wording.
struct Query {
    QueryKind kind = QueryKind::biomarkers;
    std::string text;
};

/// The fixed query for a kind.
Query canonical_query(QueryKind kind);

/// One-shot example pair slotted into the prompt template.
struct OneShotExample {
    std::string text;
    std::string json_text;
};

/// Built-in synthetic one-shot example for a query kind.
OneShotExample default_one_shot(QueryKind kind);

/// The six template parts, assembled in template order by render().
struct PromptBundle {
    std::string instruction;
    std::string schema_text;
    std::string example_text;
    std::string example_json;
    std::string context_text;
    std::string query_text;

    std::string render() const;
};

struct GenerationConfig {
    double temperature = 0.0;
    int top_k = 0;  // 0 disables top-k sampling
    double top_p = 1.0;
    int max_output_tokens = 1024;
    std::optional<long> seed = 1234;
    int max_retries = 3;
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PromptBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Text-generation backend. generate() returns the raw model response and
/// throws BackendError on transport failure. Implementations declaring
/// determinism must be deterministic for a fixed (prompt, config with seed).
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string identity() const = 0;
    virtual std::string generate(const std::string& prompt, const GenerationConfig& cfg) = 0;
};

/// Client for the generation endpoint wire contract:
/// POST {"prompt", "temperature", "top_p", "top_k", "max_tokens", "seed"}
/// -> {"text": string}.
class HttpGenerationBackend : public GenerationBackend {
public:
    HttpGenerationBackend(std::string url, std::string model_identity, int timeout_seconds = 300)
        : url_(std::move(url)), identity_(std::move(model_identity)), timeout_seconds_(timeout_seconds) {}

    std::string identity() const override { return identity_; }
    std::string generate(const std::string& prompt, const GenerationConfig& cfg) override;

private:
    std::string url_;
    std::string identity_;
    int timeout_seconds_;
};

inline constexpr long kDefaultMaxPromptTokens = 8000;

/// Fills the prompt template. Throws std::invalid_argument on empty context
/// and PromptBudgetError when the assembled prompt exceeds the token budget
/// (the caller must shrink the context).
PromptBundle build_prompt(const Query& query, const std::string& context_text, const SchemaNode& schema,
                          const OneShotExample& one_shot, long max_prompt_tokens = kDefaultMaxPromptTokens);

/// Content of the first ```json fence (to the closing fence, or end of text
/// when the fence is unterminated); otherwise the first brace-balanced
/// {...} substring; otherwise "" (no JSON found).
std::string extract_json_block(const std::string& raw);

/// One attempt line of the per-attempt audit log.
struct AttemptAudit {
    std::string note_id;
    QueryKind query_kind = QueryKind::biomarkers;
    int attempt = 0;
    long violation_count = 0;
    double latency_ms = 0.0;
    bool transport_failure = false;
};

using AuditSink = std::function<void(const AttemptAudit&)>;

/// Result of the generate -> extract -> repair -> parse -> validate loop.
/// doc is set iff some attempt produced a schema-conforming document.
struct ExtractOutcome {
    std::optional<nlohmann::json> doc;
    int attempts = 0;
    std::string failure_reason;
};

/// Runs the validation loop for one (note, query): on violations the prompt
/// is re-issued with the violation list appended to the instruction; after
/// cfg.max_retries attempts the outcome is a no-response for this query.
ExtractOutcome extract_with_retry(GenerationBackend& backend, const Query& query, const std::string& context_text,
                                  const SchemaNode& schema, const GenerationConfig& cfg,
                                  const AuditSink& sink = {}, const std::string& note_id = "");

struct NoteExtraction {
    PhenotypeRecord record;
    std::set<QueryKind> failed_queries;     // per-query no-responses
    std::map<QueryKind, int> attempts_used;
};

/// Runs all four queries against one finalized context and assembles the
/// result. Failed queries leave their phenotype group null.
NoteExtraction extract_note(GenerationBackend& backend, const std::string& note_id, const std::string& context_text,
                            const GenerationConfig& cfg, const std::string& extracted_at,
                            const AuditSink& sink = {});

}  // namespace pheno
