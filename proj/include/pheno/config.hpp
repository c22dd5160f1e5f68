#pragma once

#include <filesystem>
#include <string>

#include "pheno/llm.hpp"
#include "pheno/preprocess.hpp"
#include "pheno/retrieve.hpp"

namespace pheno {

struct Endpoints {
    std::string generation_url = "http://127.0.0.1:8089/generate";
    std::string embedding_url = "http://127.0.0.1:8090/embed";
};

struct PipelineConfig {
    RetrievalConfig retrieval;
    GenerationConfig generation;
    SectionFilterConfig section_filter;
    Endpoints endpoints;
    std::filesystem::path store_path = "annotations.jsonl";
    int concurrency_limit = 1;
    std::string model_identity = "llm";
    std::string fixed_timestamp;  // when set, stamped on every record (reproducible runs)
};

/// Loads "key = value" lines (dotted keys, '#' comments). Unknown keys are an
/// error. Environment variables GEN_ENDPOINT and EMB_ENDPOINT override the
/// endpoint URLs afterwards either way.
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies the environment overrides to an existing config.
void apply_env_overrides(PipelineConfig& cfg);

}  // namespace pheno
