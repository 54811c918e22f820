#include "coral/chunking.hpp"

#include <algorithm>

#include "coral/errors.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

constexpr std::size_t kSnapWindow = 40;

// True when cutting at `end` already lands on a word boundary.
bool clean_cut(std::string_view body, std::size_t end) {
    return is_ascii_space(body[end]) || is_ascii_space(body[end - 1]);
}

} // namespace

void validate_policy(const ChunkPolicy& policy) {
    if (policy.max_chars == 0 || policy.max_chars <= policy.overlap_chars) {
        throw ConfigError("chunk policy requires max_chars > overlap_chars >= 0");
    }
}

std::vector<ChunkSpan> chunk_spans(std::string_view body, const ChunkPolicy& policy) {
    validate_policy(policy);
    std::vector<ChunkSpan> spans;
    const std::size_t n = body.size();
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = std::min(start + policy.max_chars, n);
        if (end < n && !clean_cut(body, end)) {
            const std::size_t lo = std::max(end >= kSnapWindow ? end - kSnapWindow : 0, start);
            bool snapped = false;
            for (std::size_t p = end; p-- > lo;) {
                if (is_ascii_space(body[p])) {
                    end = p + 1;
                    snapped = true;
                    break;
                }
            }
            if (!snapped) {
                const std::size_t floored = utf8_floor_boundary(body, end);
                if (floored > start) {
                    end = floored;
                }
            }
        }
        spans.push_back({start, end});
        if (end >= n) {
            break;
        }
        start = std::max(end > policy.overlap_chars ? end - policy.overlap_chars : 0, start + 1);
    }
    return spans;
}

std::string make_chunk_id(std::string_view doc_id, std::size_t ordinal) {
    std::string num = std::to_string(ordinal);
    if (num.size() < 4) {
        num.insert(0, 4 - num.size(), '0');
    }
    std::string out(doc_id);
    out.push_back('#');
    out += num;
    return out;
}

} // namespace coral
