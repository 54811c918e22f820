#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "coral/chunking.hpp"
#include "coral/lang.hpp"

namespace coral {

struct DocumentRecord {
    std::string doc_id;
    Lang lang = Lang::en;
    std::string title;
    std::string body;
    std::optional<std::string> source_uri;
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    Lang lang = Lang::en;
    std::string text;
    ChunkSpan span;
};

struct CorpusManifest {
    Lang lang = Lang::en;
    std::uint64_t doc_count = 0;
    std::uint64_t chunk_count = 0;
    ChunkPolicy chunk_policy;
    std::string content_digest;
};

// Directory-backed chunk store: one subdirectory per language code holding
// chunks.jsonl plus manifest.json. Ingestion replaces the corpus for that
// language; identical input bytes produce byte-identical files.
class CorpusStore {
  public:
    explicit CorpusStore(std::filesystem::path root);

    CorpusManifest ingest_jsonl(const std::filesystem::path& path, Lang lang,
                                const ChunkPolicy& policy);
    CorpusManifest ingest_documents(Lang lang, const std::vector<DocumentRecord>& docs,
                                    const ChunkPolicy& policy);

    const Chunk& get_chunk(const std::string& chunk_id) const;
    const Chunk* find_chunk(Lang lang, const std::string& chunk_id) const;

    // Sorted by language code.
    std::vector<CorpusManifest> list_corpora() const;

    bool has_corpus(Lang lang) const;
    const std::vector<Chunk>& chunks(Lang lang) const;
    const std::filesystem::path& root() const { return root_; }

  private:
    struct CorpusData {
        CorpusManifest manifest;
        std::vector<Chunk> chunks;
        std::unordered_map<std::string, std::size_t> by_id;
    };

    CorpusManifest ingest_parsed(Lang lang, const std::vector<DocumentRecord>& docs,
                                 const ChunkPolicy& policy, const std::string& digest);
    void load_existing();
    void load_corpus_dir(Lang lang, const std::filesystem::path& dir);

    std::filesystem::path root_;
    std::map<Lang, CorpusData> corpora_;
};

} // namespace coral
