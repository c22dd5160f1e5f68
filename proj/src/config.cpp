#include "pheno/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pheno {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());

    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));

        try {
            if (key == "retrieval.token_threshold") cfg.retrieval.token_threshold = std::stol(value);
            else if (key == "retrieval.top_k") cfg.retrieval.top_k = std::stoi(value);
            else if (key == "retrieval.chunk_target_tokens") cfg.retrieval.chunk_target_tokens = std::stol(value);
            else if (key == "retrieval.bm25_k1") cfg.retrieval.bm25_k1 = std::stod(value);
            else if (key == "retrieval.bm25_b") cfg.retrieval.bm25_b = std::stod(value);
            else if (key == "generation.temperature") cfg.generation.temperature = std::stod(value);
            else if (key == "generation.top_k") cfg.generation.top_k = std::stoi(value);
            else if (key == "generation.top_p") cfg.generation.top_p = std::stod(value);
            else if (key == "generation.max_output_tokens") cfg.generation.max_output_tokens = std::stoi(value);
            else if (key == "generation.seed")
                cfg.generation.seed = value == "none" ? std::nullopt : std::optional<long>(std::stol(value));
            else if (key == "generation.max_retries") cfg.generation.max_retries = std::stoi(value);
            else if (key == "section_filter.drop_headers")
                cfg.section_filter.drop_section_headers = split_list(value);
            else if (key == "endpoints.generation_url") cfg.endpoints.generation_url = value;
            else if (key == "endpoints.embedding_url") cfg.endpoints.embedding_url = value;
            else if (key == "store.path") cfg.store_path = value;
            else if (key == "concurrency_limit") cfg.concurrency_limit = std::stoi(value);
            else if (key == "model_identity") cfg.model_identity = value;
            else if (key == "fixed_timestamp") cfg.fixed_timestamp = value;
            else throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception&) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": bad value for " + key);
        }
    }

    if (cfg.concurrency_limit < 1) throw std::runtime_error("concurrency_limit must be >= 1");
    if (cfg.retrieval.top_k < 1) throw std::runtime_error("retrieval.top_k must be >= 1");
    if (cfg.retrieval.token_threshold <= cfg.retrieval.chunk_target_tokens)
        throw std::runtime_error("retrieval.token_threshold must exceed retrieval.chunk_target_tokens");
    if (cfg.generation.temperature < 0) throw std::runtime_error("generation.temperature must be >= 0");
    if (cfg.generation.top_p <= 0 || cfg.generation.top_p > 1)
        throw std::runtime_error("generation.top_p must be in (0, 1]");
    if (cfg.generation.max_retries < 1) throw std::runtime_error("generation.max_retries must be >= 1");
    apply_env_overrides(cfg);
    return cfg;
}

void apply_env_overrides(PipelineConfig& cfg) {
    if (const char* gen = std::getenv("GEN_ENDPOINT"); gen && *gen) cfg.endpoints.generation_url = gen;
    if (const char* emb = std::getenv("EMB_ENDPOINT"); emb && *emb) cfg.endpoints.embedding_url = emb;
}

}  // namespace pheno
