#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coral/corpus_store.hpp"
#include "coral/embedding.hpp"
#include "coral/lang.hpp"

namespace coral {

struct ScoredHit {
    std::string chunk_id;
    Lang lang = Lang::en;
    double score = 0.0;
    int rank = 0;

    bool operator==(const ScoredHit&) const = default;
};

struct IndexShard {
    Lang lang = Lang::en;
    std::size_t dim = 0;
    std::vector<float> matrix;         // row-major, unit-norm rows
    std::vector<std::string> row_map;  // row -> chunk_id, ascending
    std::string embed_model_tag;
};

// Exact cosine top-k over unit vectors (so: dot product). Per-language result
// lists break ties by ascending chunk_id; pooled results by (language code,
// chunk_id). Shards persist as a fixed binary file plus a JSON sidecar.
class VectorIndex {
  public:
    VectorIndex(std::filesystem::path dir, std::shared_ptr<EmbeddingBackend> backend);

    // Unit-normalized vectors, one per text, dimension-checked against any
    // existing shard.
    std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& texts);

    const IndexShard& build_shard(const CorpusStore& store, Lang lang);
    void load_all_shards();

    bool has_shard(Lang lang) const;
    const IndexShard& shard(Lang lang) const;
    std::vector<Lang> shard_langs() const;

    std::map<Lang, std::vector<ScoredHit>> search(const std::vector<float>& query_vec,
                                                  const std::vector<Lang>& langs,
                                                  std::size_t k) const;
    std::vector<ScoredHit> search_pooled(const std::vector<float>& query_vec, std::size_t k) const;
    std::vector<ScoredHit> search_pooled(const std::vector<float>& query_vec,
                                         const std::vector<Lang>& langs, std::size_t k) const;

    const std::filesystem::path& dir() const { return dir_; }
    EmbeddingBackend& backend() { return *backend_; }

  private:
    void persist_shard(const IndexShard& shard) const;
    IndexShard read_shard(Lang lang) const;
    std::vector<ScoredHit> shard_topk(const IndexShard& shard, const std::vector<float>& query_vec,
                                      std::size_t k) const;

    std::filesystem::path dir_;
    std::shared_ptr<EmbeddingBackend> backend_;
    std::map<Lang, IndexShard> shards_;
};

// Normalizes in place to unit L2 norm; throws on a zero vector.
void normalize_vector(std::vector<float>& v);

} // namespace coral
