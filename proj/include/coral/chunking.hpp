#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace coral {

struct ChunkPolicy {
    std::size_t max_chars = 1200;
    std::size_t overlap_chars = 200;

    bool operator==(const ChunkPolicy&) const = default;
};

// Throws ConfigError unless max_chars > overlap_chars.
void validate_policy(const ChunkPolicy& policy);

struct ChunkSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const ChunkSpan&) const = default;
};

// Sliding-window byte spans over body. Windows advance by
// max(end - overlap, start + 1). A non-final boundary is snapped back to the
// nearest ASCII whitespace within 40 bytes when the cut would split a word;
// otherwise it is moved to the nearest UTF-8 codepoint boundary.
std::vector<ChunkSpan> chunk_spans(std::string_view body, const ChunkPolicy& policy);

// "<doc_id>#<ordinal>" with the ordinal zero-padded to 4 digits.
std::string make_chunk_id(std::string_view doc_id, std::size_t ordinal);

} // namespace coral
