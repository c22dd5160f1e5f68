#include "pheno/llm.hpp"

#include <chrono>

#include <httplib.h>

#include "http_util.hpp"
#include "pheno/postprocess.hpp"
#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

constexpr const char* kInstruction =
    "You are an expert in the Breast Cancer domain. You are also an expert in extracting information asked "
    "within a schema. Unfortunately, you can only respond in JSON format, but you make fantastic JSON objects "
    "free of errors. Your job is to, given a schema and a note context, extract the information from the notes "
    "that are required for the schema and make a JSON object that adheres to the schema guidelines. Here are "
    "some rules that you have to follow:\n"
    "- Do not return or modify the schema.\n"
    "- Do not make far-fetched assumptions. Obvious ones are fine.\n"
    "- If given enums, do not deviate from the ones provided.\n"
    "- Only provide the JSON object. Do not give anything else. Do not even add comments in the JSON object.\n"
    "- If anything specified in the schema is not present in the note, mark it as null. Do not remove it from "
    "the schema.\n"
    "- If there are multiple readings of the information to extract, pick the reading by the latest date.";

}  // namespace

Query canonical_query(QueryKind kind) {
    switch (kind) {
        case QueryKind::tnm_staging:
            return {kind, "What is the stage of the cancer and the T, N and M values?"};
        case QueryKind::tumor_info:
            return {kind,
                    "List down all tumors found in the note above specifically tumor size, lesions, dates and "
                    "masses."};
        case QueryKind::grade_performance:
            return {kind, "What are the values for grade, ECOG, KARNOFSKY/KPS found in text above"};
        case QueryKind::biomarkers:
            return {kind, "List HER-2, ER, PR  biomarkers that the patient was tested for and their values."};
    }
    return {kind, ""};
}

OneShotExample default_one_shot(QueryKind kind) {
    switch (kind) {
        case QueryKind::tnm_staging:
            return {"Pathology confirms invasive ductal carcinoma, pT2 pN1 M0, consistent with stage IIB disease.",
                    "{\"t\": \"T2\", \"n\": \"N1\", \"m\": \"M0\", \"stage_group\": \"IIB\"}"};
        case QueryKind::tumor_info:
            return {"Ultrasound on 03/14/2021 demonstrates a 1.8 cm mass in the left breast at 2 o'clock, with an "
                    "additional 6 mm satellite lesion.",
                    "{\"tumors\": [{\"size_value\": 1.8, \"size_unit\": \"cm\", \"kind\": \"mass\", \"location\": "
                    "\"left breast, 2 o'clock\", \"date\": \"03/14/2021\"}, {\"size_value\": 6, \"size_unit\": "
                    "\"mm\", \"kind\": \"lesion\", \"location\": null, \"date\": \"03/14/2021\"}]}"};
        case QueryKind::grade_performance:
            return {"Nottingham grade 2. The patient remains active, ECOG performance status 1, Karnofsky 80%.",
                    "{\"grade\": 2, \"ecog\": 1, \"karnofsky\": 80}"};
        case QueryKind::biomarkers:
            return {"Receptor panel resulted 01/12/2021: ER positive (90%), PR negative, HER-2/neu negative by "
                    "IHC.",
                    "{\"er\": \"positive\", \"pr\": \"negative\", \"her2\": \"negative\"}"};
    }
    return {};
}

std::string PromptBundle::render() const {
    std::string out;
    out.reserve(instruction.size() + schema_text.size() + example_text.size() + example_json.size() +
                context_text.size() + query_text.size() + 128);
    out += instruction;
    out += "\nSchema:\n```json\n";
    out += schema_text;
    out += "\n```\nExample Text:\n";
    out += example_text;
    out += "\nExample JSON:\n```json\n";
    out += example_json;
    out += "\n```\nActual Text:\n";
    out += context_text;
    out += "\nQuery:\n";
    out += query_text;
    out += "\n";
    return out;
}

PromptBundle build_prompt(const Query& query, const std::string& context_text, const SchemaNode& schema,
                          const OneShotExample& one_shot, long max_prompt_tokens) {
    if (context_text.empty()) throw std::invalid_argument("build_prompt: empty context");
    PromptBundle bundle;
    bundle.instruction = kInstruction;
    bundle.schema_text = render_schema(schema);
    bundle.example_text = one_shot.text;
    bundle.example_json = one_shot.json_text;
    bundle.context_text = context_text;
    bundle.query_text = query.text;
    long tokens = count_tokens(bundle.render());
    if (tokens > max_prompt_tokens)
        throw PromptBudgetError("assembled prompt is " + std::to_string(tokens) + " tokens, budget " +
                                std::to_string(max_prompt_tokens));
    return bundle;
}

std::string extract_json_block(const std::string& raw) {
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return std::string();
        size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    };

    size_t fence = raw.find("```json");
    if (fence != std::string::npos) {
        size_t start = fence + 7;
        if (start < raw.size() && raw[start] == '\r') ++start;
        if (start < raw.size() && raw[start] == '\n') ++start;
        size_t close = raw.find("```", start);
        if (close == std::string::npos) return trim(raw.substr(start));
        return trim(raw.substr(start, close - start));
    }

    size_t open = raw.find('{');
    if (open == std::string::npos) return "";
    int depth = 0;
    bool in_string = false, escape = false;
    for (size_t i = open; i < raw.size(); ++i) {
        char c = raw[i];
        if (in_string) {
            if (escape) escape = false;
            else if (c == '\\') escape = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return raw.substr(open, i - open + 1);
        }
    }
    return "";
}

std::string HttpGenerationBackend::generate(const std::string& prompt, const GenerationConfig& cfg) {
    auto [base, path] = detail::split_url(url_);
    httplib::Client client(base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    nlohmann::json body{{"prompt", prompt},          {"temperature", cfg.temperature},
                        {"top_p", cfg.top_p},        {"top_k", cfg.top_k},
                        {"max_tokens", cfg.max_output_tokens},
                        {"seed", cfg.seed ? nlohmann::json(*cfg.seed) : nlohmann::json(nullptr)}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw BackendError("generation endpoint unreachable: " + url_);
    if (res->status != 200) throw BackendError("generation endpoint returned HTTP " + std::to_string(res->status));
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("text") || !parsed["text"].is_string())
        throw BackendError("generation endpoint returned malformed body");
    return parsed["text"].get<std::string>();
}

ExtractOutcome extract_with_retry(GenerationBackend& backend, const Query& query, const std::string& context_text,
                                  const SchemaNode& schema, const GenerationConfig& cfg, const AuditSink& sink,
                                  const std::string& note_id) {
    if (cfg.max_retries < 1) throw std::invalid_argument("max_retries must be >= 1");
    PromptBundle bundle = build_prompt(query, context_text, schema, default_one_shot(query.kind));
    const std::string base_instruction = bundle.instruction;

    ExtractOutcome outcome;
    for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
        outcome.attempts = attempt;
        AttemptAudit audit;
        audit.note_id = note_id;
        audit.query_kind = query.kind;
        audit.attempt = attempt;

        auto t0 = std::chrono::steady_clock::now();
        std::string raw;
        bool transport_ok = true;
        try {
            raw = backend.generate(bundle.render(), cfg);
        } catch (const BackendError& e) {
            transport_ok = false;
            outcome.failure_reason = e.what();
        }
        audit.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        if (!transport_ok) {
            audit.transport_failure = true;
            if (sink) sink(audit);
            continue;  // same prompt, next attempt
        }

        std::vector<SchemaViolation> violations;
        std::string block = extract_json_block(raw);
        if (block.empty()) {
            violations.push_back({"", SchemaViolation::Rule::wrong_type, "no JSON object found in response"});
        } else {
            nlohmann::json doc = nlohmann::json::parse(fix_brackets(block), nullptr, false);
            if (doc.is_discarded())
                violations.push_back({"", SchemaViolation::Rule::wrong_type, "invalid JSON after bracket repair"});
            else
                violations = validate(doc, schema);
            if (violations.empty()) {
                if (sink) sink(audit);
                outcome.doc = std::move(doc);
                outcome.failure_reason.clear();
                return outcome;
            }
        }

        audit.violation_count = static_cast<long>(violations.size());
        if (sink) sink(audit);
        outcome.failure_reason = describe(violations);
        bundle.instruction = base_instruction + "\n\nYour previous JSON had these problems: " +
                             describe(violations) + ". Return only corrected JSON.";
    }
    return outcome;
}

NoteExtraction extract_note(GenerationBackend& backend, const std::string& note_id, const std::string& context_text,
                            const GenerationConfig& cfg, const std::string& extracted_at, const AuditSink& sink) {
    NoteExtraction result;
    std::map<QueryKind, nlohmann::json> docs;
    for (QueryKind kind : all_query_kinds()) {
        ExtractOutcome outcome = extract_with_retry(backend, canonical_query(kind), context_text,
                                                    phenotype_schema(kind), cfg, sink, note_id);
        result.attempts_used[kind] = outcome.attempts;
        if (outcome.doc)
            docs[kind] = std::move(*outcome.doc);
        else
            result.failed_queries.insert(kind);
    }
    result.record = assemble_record(docs, note_id, backend.identity(), extracted_at);
    return result;
}

}  // namespace pheno
