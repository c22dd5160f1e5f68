#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "pheno/pipeline.hpp"

namespace {

// 0 success, 2 partial (some no-responses), 1 fatal
constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Breast-cancer phenotype extraction pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value configuration file");

    std::string in_path, out_path, store_path, gold_path, extractor = "baseline";
    long threshold = 2500;

    auto* preprocess = app.add_subcommand("preprocess", "Strip sections and compute differential text");
    preprocess->add_option("input", in_path, "raw corpus (JSON-lines of clinical notes)")->required();
    preprocess->add_option("output", out_path, "processed corpus output path")->required();

    auto* extract = app.add_subcommand("extract", "Run an extractor over a processed corpus");
    extract->add_option("input", in_path, "processed corpus (JSON-lines)")->required();
    extract->add_option("--extractor", extractor, "llm or baseline")->check(CLI::IsMember({"llm", "baseline"}));
    extract->add_option("--store", store_path, "annotation store path (overrides config)");

    auto* eval = app.add_subcommand("eval", "Compare the annotation store against gold labels");
    eval->add_option("store", store_path, "annotation store path")->required();
    eval->add_option("gold", gold_path, "gold labels (JSON-lines)")->required();

    auto* tokens = app.add_subcommand("tokens", "Token-length histogram of a raw corpus");
    tokens->add_option("input", in_path, "raw corpus (JSON-lines)")->required();
    tokens->add_option("--threshold", threshold, "retrieval bypass threshold");

    std::string schema_kind;
    auto* schema = app.add_subcommand("schema", "Print a phenotype extraction schema as canonical JSON");
    schema->add_option("kind", schema_kind, "tnm_staging, tumor_info, grade_performance or biomarkers")
        ->required()
        ->check(CLI::IsMember({"tnm_staging", "tumor_info", "grade_performance", "biomarkers"}));

    CLI11_PARSE(app, argc, argv);

    try {
        pheno::PipelineConfig cfg;
        if (!config_path.empty())
            cfg = pheno::load_config(config_path);
        else
            pheno::apply_env_overrides(cfg);
        if (!store_path.empty()) cfg.store_path = store_path;

        if (preprocess->parsed()) {
            auto summary = pheno::cmd_preprocess(in_path, out_path, cfg);
            std::printf("processed %ld notes; mean token reduction %.1f\n", summary.notes,
                        summary.mean_token_reduction);
            return kOk;
        }
        if (extract->parsed()) {
            pheno::ExtractSummary summary;
            if (extractor == "baseline") {
                summary = pheno::cmd_extract(in_path, pheno::ExtractorChoice::baseline, cfg, nullptr, nullptr);
            } else {
                auto timeout_of = [](const char* env, int fallback) {
                    const char* v = std::getenv(env);
                    return v && *v ? std::atoi(v) : fallback;
                };
                pheno::HttpGenerationBackend backend(cfg.endpoints.generation_url, cfg.model_identity,
                                                     timeout_of("GEN_TIMEOUT_S", 300));
                pheno::HttpEmbedder embedder(cfg.endpoints.embedding_url, timeout_of("EMB_TIMEOUT_S", 120));
                summary = pheno::cmd_extract(in_path, pheno::ExtractorChoice::llm, cfg, &backend, &embedder);
            }
            std::printf("extracted %ld notes; %ld no-response, %ld partial\n", summary.notes,
                        summary.no_response_notes, summary.partial_failures);
            return summary.no_response_notes > 0 || summary.partial_failures > 0 ? kPartial : kOk;
        }
        if (eval->parsed()) {
            std::cout << pheno::cmd_eval(store_path, gold_path);
            return kOk;
        }
        if (tokens->parsed()) {
            std::cout << pheno::cmd_tokens(in_path, threshold);
            return kOk;
        }
        if (schema->parsed()) {
            std::cout << pheno::render_schema(pheno::phenotype_schema(*pheno::query_kind_from_string(schema_kind)))
                      << "\n";
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFatal;
    }
    return kFatal;
}
