#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coral {

// Produces raw (not yet normalized) vectors, one per input text, same order.
class EmbeddingBackend {
  public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
    virtual std::string model_tag() const = 0;
};

// Deterministic offline embedder: signed feature hashing of lowercased
// word tokens and byte trigrams. Gives stable, text-sensitive vectors for
// scripted runs without a live endpoint.
class HashedNgramEmbedder : public EmbeddingBackend {
  public:
    explicit HashedNgramEmbedder(std::size_t dim = 256);

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::string model_tag() const override;
    std::size_t dim() const { return dim_; }

  private:
    std::size_t dim_;
};

struct HttpEndpointConfig {
    std::string base_url;         // e.g. "http://localhost:8089"
    std::string path;             // e.g. "/v1/embeddings"
    std::string model;
    std::string api_key;          // optional bearer token
    int max_retries = 3;
    int backoff_ms = 250;         // doubles per retry
    int timeout_sec = 120;
};

// Client for the common embeddings wire shape: POST {model, input:[texts]}
// returning {data: [{index, embedding: [...]}, ...]}.
class HttpEmbeddingClient : public EmbeddingBackend {
  public:
    explicit HttpEmbeddingClient(HttpEndpointConfig config);

    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    std::string model_tag() const override;

  private:
    HttpEndpointConfig config_;
};

} // namespace coral
