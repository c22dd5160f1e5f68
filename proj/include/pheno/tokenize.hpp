#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pheno {

/// Deterministic proxy tokenizer: whitespace separates tokens and every
/// printable-ASCII non-alphanumeric character is a standalone token.
/// Bytes >= 0x80 are treated as word characters so the count is total on
/// arbitrary input.
std::vector<std::string_view> tokenize(std::string_view text);

long count_tokens(std::string_view text);

/// ASCII lowercase fold, used for lexical term matching.
std::string fold_case(std::string_view s);

}  // namespace pheno
