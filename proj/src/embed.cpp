#include "pheno/embed.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "pheno/tokenize.hpp"

namespace pheno {

namespace {

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<EmbeddingVector> HashingEmbedder::embed(const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector v(dimension_, 0.0);
        bool any = false;
        for (auto token : tokenize(text)) {
            uint64_t h = fnv1a(fold_case(token));
            double sign = (h >> 63) ? 1.0 : -1.0;
            v[h % dimension_] += sign;
            any = true;
        }
        if (!any) v[0] = 1.0;
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            v.assign(dimension_, 0.0);
            v[0] = 1.0;
        } else {
            for (double& x : v) x /= norm;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) const {
    auto [base, path] = detail::split_url(url_);
    httplib::Client client(base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    nlohmann::json body{{"texts", texts}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw EmbedderError("embedding endpoint unreachable: " + url_);
    if (res->status != 200)
        throw EmbedderError("embedding endpoint returned HTTP " + std::to_string(res->status));

    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("vectors") || !parsed["vectors"].is_array())
        throw EmbedderError("embedding endpoint returned malformed body");
    std::vector<EmbeddingVector> out;
    out.reserve(parsed["vectors"].size());
    for (const auto& vec : parsed["vectors"]) out.push_back(vec.get<EmbeddingVector>());
    if (out.size() != texts.size()) throw EmbedderError("embedding endpoint returned wrong vector count");
    return out;
}

}  // namespace pheno
