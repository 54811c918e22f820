#include "coral/vector_index.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "coral/errors.hpp"
#include "coral/topk.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'C', 'O', 'R', 'A', 'L', 'S', 'H', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kEmbedBatch = 128;

void append_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

std::uint32_t read_u32_le(const std::string& bytes, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    }
    return v;
}

std::uint64_t read_u64_le(const std::string& bytes, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    }
    return v;
}

} // namespace

void normalize_vector(std::vector<float>& v) {
    double sq = 0.0;
    for (float x : v) {
        sq += static_cast<double>(x) * static_cast<double>(x);
    }
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) {
        throw Error("cannot normalize a zero embedding vector");
    }
    for (float& x : v) {
        x = static_cast<float>(static_cast<double>(x) / norm);
    }
}

VectorIndex::VectorIndex(std::filesystem::path dir, std::shared_ptr<EmbeddingBackend> backend)
    : dir_(std::move(dir)), backend_(std::move(backend)) {
    if (!backend_) {
        throw ConfigError("vector index requires an embedding backend");
    }
    std::filesystem::create_directories(dir_);
}

std::vector<std::vector<float>> VectorIndex::embed_batch(const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw ConfigError("embed_batch requires a non-empty batch");
    }
    auto vectors = backend_->embed(texts);
    if (vectors.size() != texts.size()) {
        throw ParseError("embedding backend returned " + std::to_string(vectors.size()) +
                         " vectors for " + std::to_string(texts.size()) + " inputs");
    }
    std::size_t expected_dim = 0;
    for (const auto& [lang, shard] : shards_) {
        if (!shard.row_map.empty()) {
            expected_dim = shard.dim;
            break;
        }
    }
    for (auto& v : vectors) {
        if (v.empty()) {
            throw ParseError("embedding backend returned an empty vector");
        }
        if (expected_dim == 0) {
            expected_dim = v.size();
        }
        if (v.size() != expected_dim) {
            throw ConfigError("embedding dimension mismatch: got " + std::to_string(v.size()) +
                              ", index uses " + std::to_string(expected_dim));
        }
        normalize_vector(v);
    }
    return vectors;
}

const IndexShard& VectorIndex::build_shard(const CorpusStore& store, Lang lang) {
    const auto& chunks = store.chunks(lang);
    std::vector<std::size_t> order(chunks.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return chunks[a].chunk_id < chunks[b].chunk_id;
    });

    IndexShard shard;
    shard.lang = lang;
    shard.embed_model_tag = backend_->model_tag();
    shard.row_map.reserve(chunks.size());
    for (std::size_t idx : order) {
        shard.row_map.push_back(chunks[idx].chunk_id);
    }
    for (std::size_t begin = 0; begin < order.size(); begin += kEmbedBatch) {
        const std::size_t end = std::min(begin + kEmbedBatch, order.size());
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            texts.push_back(chunks[order[i]].text);
        }
        auto vectors = embed_batch(texts);
        for (auto& v : vectors) {
            if (shard.dim == 0) {
                shard.dim = v.size();
            }
            shard.matrix.insert(shard.matrix.end(), v.begin(), v.end());
        }
    }
    persist_shard(shard);
    auto [it, inserted] = shards_.insert_or_assign(lang, std::move(shard));
    return it->second;
}

void VectorIndex::persist_shard(const IndexShard& shard) const {
    std::string bytes;
    bytes.reserve(24 + shard.matrix.size() * 4);
    bytes.append(kMagic, sizeof(kMagic));
    append_u32_le(bytes, kVersion);
    append_u32_le(bytes, static_cast<std::uint32_t>(shard.dim));
    append_u64_le(bytes, static_cast<std::uint64_t>(shard.row_map.size()));
    for (float f : shard.matrix) {
        append_u32_le(bytes, std::bit_cast<std::uint32_t>(f));
    }
    const std::string code(lang_code(shard.lang));
    write_file_bytes(dir_ / (code + ".bin"), bytes);
    json sidecar{
        {"lang", code},
        {"embed_model_tag", shard.embed_model_tag},
        {"row_map", shard.row_map},
    };
    write_file_bytes(dir_ / (code + ".json"), sidecar.dump(2) + "\n");
}

IndexShard VectorIndex::read_shard(Lang lang) const {
    const std::string code(lang_code(lang));
    const auto bin_path = dir_ / (code + ".bin");
    const std::string bytes = read_file_bytes(bin_path);
    if (bytes.size() < 24 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("bad shard file header: " + bin_path.string());
    }
    if (read_u32_le(bytes, 8) != kVersion) {
        throw ParseError("unsupported shard version in " + bin_path.string());
    }
    IndexShard shard;
    shard.lang = lang;
    shard.dim = read_u32_le(bytes, 12);
    const std::uint64_t rows = read_u64_le(bytes, 16);
    const std::size_t expected = 24 + static_cast<std::size_t>(rows) * shard.dim * 4;
    if (bytes.size() != expected) {
        throw ParseError("shard file size mismatch: " + bin_path.string());
    }
    shard.matrix.resize(static_cast<std::size_t>(rows) * shard.dim);
    for (std::size_t i = 0; i < shard.matrix.size(); ++i) {
        shard.matrix[i] = std::bit_cast<float>(read_u32_le(bytes, 24 + i * 4));
    }
    json sidecar = json::parse(read_file_bytes(dir_ / (code + ".json")));
    shard.row_map = sidecar.at("row_map").get<std::vector<std::string>>();
    shard.embed_model_tag = sidecar.at("embed_model_tag").get<std::string>();
    if (shard.row_map.size() != rows) {
        throw ParseError("row map size mismatch for shard " + code);
    }
    return shard;
}

void VectorIndex::load_all_shards() {
    for (Lang lang : all_langs()) {
        const std::string code(lang_code(lang));
        if (std::filesystem::exists(dir_ / (code + ".bin"))) {
            shards_[lang] = read_shard(lang);
        }
    }
}

bool VectorIndex::has_shard(Lang lang) const { return shards_.count(lang) != 0; }

const IndexShard& VectorIndex::shard(Lang lang) const {
    auto it = shards_.find(lang);
    if (it == shards_.end()) {
        throw NotFoundError("no shard for language: " + std::string(lang_code(lang)));
    }
    return it->second;
}

std::vector<Lang> VectorIndex::shard_langs() const {
    std::vector<Lang> out;
    out.reserve(shards_.size());
    for (const auto& [lang, shard] : shards_) {
        out.push_back(lang);
    }
    return out;
}

std::vector<ScoredHit> VectorIndex::shard_topk(const IndexShard& shard,
                                               const std::vector<float>& query_vec,
                                               std::size_t k) const {
    if (shard.row_map.empty() || k == 0) {
        return {};
    }
    if (query_vec.size() != shard.dim) {
        throw ConfigError("query dimension " + std::to_string(query_vec.size()) +
                          " does not match shard dimension " + std::to_string(shard.dim));
    }
    const auto rows = topk_dot_parallel(shard.matrix.data(), shard.row_map.size(), shard.dim,
                                        query_vec.data(), k);
    std::vector<ScoredHit> hits;
    hits.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        hits.push_back({shard.row_map[rows[i].row], shard.lang, rows[i].score,
                        static_cast<int>(i + 1)});
    }
    return hits;
}

std::map<Lang, std::vector<ScoredHit>> VectorIndex::search(const std::vector<float>& query_vec,
                                                           const std::vector<Lang>& langs,
                                                           std::size_t k) const {
    if (k == 0) {
        throw ConfigError("search requires k >= 1");
    }
    std::map<Lang, std::vector<ScoredHit>> out;
    for (Lang lang : langs) {
        if (out.count(lang)) {
            continue;
        }
        out[lang] = shard_topk(shard(lang), query_vec, k);
    }
    return out;
}

std::vector<ScoredHit> VectorIndex::search_pooled(const std::vector<float>& query_vec,
                                                  std::size_t k) const {
    return search_pooled(query_vec, shard_langs(), k);
}

std::vector<ScoredHit> VectorIndex::search_pooled(const std::vector<float>& query_vec,
                                                  const std::vector<Lang>& langs,
                                                  std::size_t k) const {
    if (k == 0) {
        throw ConfigError("search requires k >= 1");
    }
    std::vector<ScoredHit> candidates;
    std::vector<bool> seen(kLangCount, false);
    for (Lang lang : langs) {
        if (seen[static_cast<std::size_t>(lang)]) {
            continue;
        }
        seen[static_cast<std::size_t>(lang)] = true;
        auto hits = shard_topk(shard(lang), query_vec, k);
        candidates.insert(candidates.end(), hits.begin(), hits.end());
    }
    std::sort(candidates.begin(), candidates.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.lang != b.lang) {
            return a.lang < b.lang;
        }
        return a.chunk_id < b.chunk_id;
    });
    if (candidates.size() > k) {
        candidates.resize(k);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].rank = static_cast<int>(i + 1);
    }
    return candidates;
}

} // namespace coral
