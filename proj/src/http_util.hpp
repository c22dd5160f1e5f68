#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pheno::detail {

// "http://host:port/path" -> {"http://host:port", "/path"}
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw std::invalid_argument("endpoint URL missing scheme: " + url);
    size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace pheno::detail
