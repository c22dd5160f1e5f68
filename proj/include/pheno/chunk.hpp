#pragma once

#include <string>
#include <vector>

namespace pheno {

/// One retrieval unit. Chunks are contiguous slices of the source text
/// (separators stay attached to the preceding chunk), so concatenating them
/// in index order reproduces the input byte-for-byte.
struct Chunk {
    long index = 0;  // 0-based original position
    std::string text;
    long token_count = 0;
};

/// Recursive splitter over the separator hierarchy ["\n\n", "\n", ". ", " "]:
/// pieces at each level are merged greedily up to target_tokens; any piece
/// still over the target is split at the next level. A piece with no
/// separators left is emitted as-is even when oversized.
std::vector<Chunk> recursive_split(const std::string& text, long target_tokens);

}  // namespace pheno
