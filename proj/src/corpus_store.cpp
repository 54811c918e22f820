#include "coral/corpus_store.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "coral/errors.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

using nlohmann::json;

json manifest_to_json(const CorpusManifest& m) {
    return json{
        {"lang", std::string(lang_code(m.lang))},
        {"doc_count", m.doc_count},
        {"chunk_count", m.chunk_count},
        {"chunk_policy",
         json{{"max_chars", m.chunk_policy.max_chars}, {"overlap_chars", m.chunk_policy.overlap_chars}}},
        {"content_digest", m.content_digest},
    };
}

CorpusManifest manifest_from_json(const json& j, const std::filesystem::path& origin) {
    CorpusManifest m;
    auto lang = parse_lang(j.at("lang").get<std::string>());
    if (!lang) {
        throw ParseError("unknown language code in manifest: " + origin.string());
    }
    m.lang = *lang;
    m.doc_count = j.at("doc_count").get<std::uint64_t>();
    m.chunk_count = j.at("chunk_count").get<std::uint64_t>();
    m.chunk_policy.max_chars = j.at("chunk_policy").at("max_chars").get<std::size_t>();
    m.chunk_policy.overlap_chars = j.at("chunk_policy").at("overlap_chars").get<std::size_t>();
    m.content_digest = j.at("content_digest").get<std::string>();
    return m;
}

json chunk_to_json(const Chunk& c) {
    return json{
        {"chunk_id", c.chunk_id},
        {"doc_id", c.doc_id},
        {"lang", std::string(lang_code(c.lang))},
        {"text", c.text},
        {"span", json::array({c.span.begin, c.span.end})},
    };
}

Chunk chunk_from_json(const json& j, Lang lang) {
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.doc_id = j.at("doc_id").get<std::string>();
    c.lang = lang;
    c.text = j.at("text").get<std::string>();
    c.span.begin = j.at("span").at(0).get<std::size_t>();
    c.span.end = j.at("span").at(1).get<std::size_t>();
    return c;
}

std::string fallback_doc_id(Lang lang, std::size_t line_no, const std::string& text) {
    std::string key(lang_code(lang));
    key += "\n" + std::to_string(line_no) + "\n" + text;
    return sha256_hex(key).substr(0, 16);
}

bool blank_line(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return is_ascii_space(c); });
}

} // namespace

CorpusStore::CorpusStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
    load_existing();
}

void CorpusStore::load_existing() {
    for (Lang lang : all_langs()) {
        auto dir = root_ / std::string(lang_code(lang));
        if (std::filesystem::exists(dir / "manifest.json")) {
            load_corpus_dir(lang, dir);
        }
    }
}

void CorpusStore::load_corpus_dir(Lang lang, const std::filesystem::path& dir) {
    CorpusData data;
    data.manifest =
        manifest_from_json(json::parse(read_file_bytes(dir / "manifest.json")), dir / "manifest.json");
    if (data.manifest.lang != lang) {
        throw ParseError("manifest language does not match directory: " + dir.string());
    }
    std::istringstream in(read_file_bytes(dir / "chunks.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        if (blank_line(line)) {
            continue;
        }
        data.chunks.push_back(chunk_from_json(json::parse(line), lang));
    }
    if (data.chunks.size() != data.manifest.chunk_count) {
        throw ParseError("chunk count mismatch in " + dir.string());
    }
    for (std::size_t i = 0; i < data.chunks.size(); ++i) {
        data.by_id.emplace(data.chunks[i].chunk_id, i);
    }
    corpora_[lang] = std::move(data);
}

CorpusManifest CorpusStore::ingest_jsonl(const std::filesystem::path& path, Lang lang,
                                         const ChunkPolicy& policy) {
    const std::string bytes = read_file_bytes(path);
    std::vector<DocumentRecord> docs;
    std::istringstream in(bytes);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_line(line)) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": not a JSON object");
        }
        if (!j.contains("text") || !j["text"].is_string()) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": missing string field 'text'");
        }
        DocumentRecord doc;
        doc.lang = lang;
        doc.body = j["text"].get<std::string>();
        if (doc.body.empty()) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": empty 'text'");
        }
        if (j.contains("id")) {
            if (!j["id"].is_string()) {
                throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": field 'id' must be a string");
            }
            doc.doc_id = j["id"].get<std::string>();
        } else {
            doc.doc_id = fallback_doc_id(lang, line_no, doc.body);
        }
        if (j.contains("title") && j["title"].is_string()) {
            doc.title = j["title"].get<std::string>();
        }
        docs.push_back(std::move(doc));
    }
    return ingest_parsed(lang, docs, policy, sha256_hex(bytes));
}

CorpusManifest CorpusStore::ingest_documents(Lang lang, const std::vector<DocumentRecord>& docs,
                                             const ChunkPolicy& policy) {
    std::string canonical;
    for (const auto& doc : docs) {
        canonical += json{{"id", doc.doc_id}, {"title", doc.title}, {"text", doc.body}}.dump();
        canonical += '\n';
    }
    return ingest_parsed(lang, docs, policy, sha256_hex(canonical));
}

CorpusManifest CorpusStore::ingest_parsed(Lang lang, const std::vector<DocumentRecord>& docs,
                                          const ChunkPolicy& policy, const std::string& digest) {
    validate_policy(policy);
    CorpusData data;
    data.manifest.lang = lang;
    data.manifest.chunk_policy = policy;
    data.manifest.content_digest = digest;
    data.manifest.doc_count = docs.size();
    std::unordered_set<std::string> seen_docs;
    for (const auto& doc : docs) {
        if (doc.body.empty()) {
            throw ParseError("document '" + doc.doc_id + "' has an empty body");
        }
        if (!seen_docs.insert(doc.doc_id).second) {
            throw ParseError("duplicate doc_id '" + doc.doc_id + "' in corpus " +
                             std::string(lang_code(lang)));
        }
        const auto spans = chunk_spans(doc.body, policy);
        for (std::size_t i = 0; i < spans.size(); ++i) {
            Chunk c;
            c.chunk_id = make_chunk_id(doc.doc_id, i);
            c.doc_id = doc.doc_id;
            c.lang = lang;
            c.text = doc.body.substr(spans[i].begin, spans[i].end - spans[i].begin);
            c.span = spans[i];
            data.chunks.push_back(std::move(c));
        }
    }
    data.manifest.chunk_count = data.chunks.size();
    for (std::size_t i = 0; i < data.chunks.size(); ++i) {
        data.by_id.emplace(data.chunks[i].chunk_id, i);
    }

    auto dir = root_ / std::string(lang_code(lang));
    std::string chunk_lines;
    for (const auto& c : data.chunks) {
        chunk_lines += chunk_to_json(c).dump();
        chunk_lines += '\n';
    }
    write_file_bytes(dir / "chunks.jsonl", chunk_lines);
    write_file_bytes(dir / "manifest.json", manifest_to_json(data.manifest).dump(2) + "\n");

    auto manifest = data.manifest;
    corpora_[lang] = std::move(data);
    return manifest;
}

const Chunk& CorpusStore::get_chunk(const std::string& chunk_id) const {
    for (const auto& [lang, data] : corpora_) {
        auto it = data.by_id.find(chunk_id);
        if (it != data.by_id.end()) {
            return data.chunks[it->second];
        }
    }
    throw NotFoundError("chunk not found: " + chunk_id);
}

const Chunk* CorpusStore::find_chunk(Lang lang, const std::string& chunk_id) const {
    auto cit = corpora_.find(lang);
    if (cit == corpora_.end()) {
        return nullptr;
    }
    auto it = cit->second.by_id.find(chunk_id);
    return it == cit->second.by_id.end() ? nullptr : &cit->second.chunks[it->second];
}

std::vector<CorpusManifest> CorpusStore::list_corpora() const {
    std::vector<CorpusManifest> out;
    out.reserve(corpora_.size());
    for (const auto& [lang, data] : corpora_) {
        out.push_back(data.manifest);
    }
    return out;
}

bool CorpusStore::has_corpus(Lang lang) const { return corpora_.count(lang) != 0; }

const std::vector<Chunk>& CorpusStore::chunks(Lang lang) const {
    auto it = corpora_.find(lang);
    if (it == corpora_.end()) {
        throw NotFoundError("no corpus for language: " + std::string(lang_code(lang)));
    }
    return it->second.chunks;
}

} // namespace coral
