#include "coral/embedding.hpp"

#include <cctype>
#include <cstdint>

#include "coral/errors.hpp"
#include "coral/util.hpp"
#include "http_json.hpp"

namespace coral {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = kFnvOffset ^ seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

void add_feature(std::vector<float>& vec, std::string_view feature, std::uint64_t seed) {
    const std::uint64_t h = fnv1a(feature, seed);
    const std::size_t idx = static_cast<std::size_t>(h % vec.size());
    const float sign = ((h >> 32) & 1) ? 1.0f : -1.0f;
    vec[idx] += sign;
}

bool token_char(unsigned char c) { return c > 0x7F || std::isalnum(c) != 0; }

} // namespace

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        throw ConfigError("embedding dimension must be positive");
    }
}

std::vector<std::vector<float>> HashedNgramEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<float> vec(dim_, 0.0f);
        const std::string lowered = to_lower_ascii(text);
        std::size_t i = 0;
        while (i < lowered.size()) {
            if (!token_char(static_cast<unsigned char>(lowered[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < lowered.size() && token_char(static_cast<unsigned char>(lowered[j]))) {
                ++j;
            }
            add_feature(vec, std::string_view(lowered).substr(i, j - i), 0x746f6b);
            i = j;
        }
        for (std::size_t p = 0; p + 3 <= lowered.size(); ++p) {
            add_feature(vec, std::string_view(lowered).substr(p, 3), 0x337267);
        }
        // Guarantees a non-zero vector even for whitespace-only text.
        add_feature(vec, "\x01__bias__", 0x62696173);
        out.push_back(std::move(vec));
    }
    return out;
}

std::string HashedNgramEmbedder::model_tag() const {
    return "hashed-ngram-v1-d" + std::to_string(dim_);
}

HttpEmbeddingClient::HttpEmbeddingClient(HttpEndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty() || config_.path.empty()) {
        throw ConfigError("embedding endpoint requires base_url and path");
    }
}

std::vector<std::vector<float>> HttpEmbeddingClient::embed(const std::vector<std::string>& texts) {
    HttpPostSpec spec{config_.base_url, config_.path,       config_.api_key,
                      config_.max_retries, config_.backoff_ms, config_.timeout_sec};
    nlohmann::json body{{"model", config_.model}, {"input", texts}};
    nlohmann::json reply = http_post_json(spec, body);
    if (!reply.contains("data") || !reply["data"].is_array()) {
        throw ParseError("embedding reply missing 'data' array");
    }
    std::vector<std::vector<float>> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    for (const auto& item : reply["data"]) {
        if (!item.contains("index") || !item.contains("embedding")) {
            throw ParseError("embedding reply item missing 'index' or 'embedding'");
        }
        const auto idx = item["index"].get<std::size_t>();
        if (idx >= out.size()) {
            throw ParseError("embedding reply index out of range");
        }
        out[idx] = item["embedding"].get<std::vector<float>>();
        filled[idx] = true;
    }
    for (std::size_t i = 0; i < filled.size(); ++i) {
        if (!filled[i]) {
            throw ParseError("embedding reply missing vector for input " + std::to_string(i));
        }
    }
    return out;
}

std::string HttpEmbeddingClient::model_tag() const { return config_.model; }

} // namespace coral
