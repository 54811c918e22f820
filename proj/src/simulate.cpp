#include "coral/simulate.hpp"

#include <memory>

#include "coral/embedding.hpp"
#include "coral/errors.hpp"
#include "coral/util.hpp"
#include "coral/vector_index.hpp"

namespace coral {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

Lang parse_lang_or_fail(const std::string& code, const std::string& path) {
    const auto lang = parse_lang(code);
    if (!lang.has_value()) {
        fail(path, "unknown language '" + code + "'");
    }
    return *lang;
}

std::vector<DocumentRecord> parse_docs(const nlohmann::json& array, Lang lang,
                                       const std::string& path) {
    if (!array.is_array()) {
        fail(path, "expected an array of documents");
    }
    std::vector<DocumentRecord> docs;
    std::size_t i = 0;
    for (const auto& entry : array) {
        const std::string doc_path = path + "[" + std::to_string(i) + "]";
        if (!entry.is_object()) {
            fail(doc_path, "expected an object");
        }
        for (const auto& [key, value] : entry.items()) {
            (void)value;
            if (key != "id" && key != "title" && key != "text") {
                fail(doc_path + "." + key, "unknown key");
            }
        }
        DocumentRecord doc;
        doc.lang = lang;
        if (!entry.contains("id") || !entry.at("id").is_string()) {
            fail(doc_path + ".id", "required string");
        }
        doc.doc_id = entry.at("id").get<std::string>();
        if (!entry.contains("text") || !entry.at("text").is_string()) {
            fail(doc_path + ".text", "required string");
        }
        doc.body = entry.at("text").get<std::string>();
        if (entry.contains("title")) {
            if (!entry.at("title").is_string()) {
                fail(doc_path + ".title", "expected a string");
            }
            doc.title = entry.at("title").get<std::string>();
        }
        docs.push_back(std::move(doc));
        ++i;
    }
    return docs;
}

} // namespace

SimulationScript simulation_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("simulation script: expected a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "query" && key != "query_lang" && key != "method" && key != "scope" &&
            key != "config" && key != "corpora" && key != "exchanges" && key != "trace_out" &&
            key != "require_exhausted") {
            fail(key, "unknown key");
        }
    }
    SimulationScript script;
    if (!j.contains("query") || !j.at("query").is_string()) {
        fail("query", "required string");
    }
    script.query = j.at("query").get<std::string>();
    if (j.contains("query_lang")) {
        if (!j.at("query_lang").is_string()) {
            fail("query_lang", "expected a language code string");
        }
        script.query_lang = parse_lang_or_fail(j.at("query_lang").get<std::string>(),
                                               "query_lang");
    }
    if (j.contains("method")) {
        if (!j.at("method").is_string()) {
            fail("method", "expected a string");
        }
        script.method = j.at("method").get<std::string>();
        if (script.method != "coral" && !parse_baseline(script.method).has_value()) {
            fail("method", "unknown method '" + script.method + "'");
        }
    }
    if (j.contains("scope")) {
        if (!j.at("scope").is_array()) {
            fail("scope", "expected an array of language codes");
        }
        std::size_t i = 0;
        for (const auto& entry : j.at("scope")) {
            const std::string path = "scope[" + std::to_string(i) + "]";
            if (!entry.is_string()) {
                fail(path, "expected a language code string");
            }
            script.scope.push_back(parse_lang_or_fail(entry.get<std::string>(), path));
            ++i;
        }
    }
    if (j.contains("config")) {
        script.config = config_from_json(j.at("config"));
    }
    if (j.contains("corpora")) {
        if (!j.at("corpora").is_object()) {
            fail("corpora", "expected an object keyed by language code");
        }
        for (const auto& [code, docs] : j.at("corpora").items()) {
            const Lang lang = parse_lang_or_fail(code, "corpora." + code);
            script.corpora.emplace_back(lang, parse_docs(docs, lang, "corpora." + code));
        }
    }
    if (j.contains("exchanges")) {
        if (!j.at("exchanges").is_array()) {
            fail("exchanges", "expected an array");
        }
        try {
            script.exchanges = ScriptedBackend::parse_exchanges(j.at("exchanges"));
        } catch (const Error& e) {
            fail("exchanges", e.what());
        }
    }
    if (j.contains("trace_out")) {
        if (!j.at("trace_out").is_string()) {
            fail("trace_out", "expected a string");
        }
        script.trace_out = j.at("trace_out").get<std::string>();
    }
    if (j.contains("require_exhausted")) {
        if (!j.at("require_exhausted").is_boolean()) {
            fail("require_exhausted", "expected a boolean");
        }
        script.require_exhausted = j.at("require_exhausted").get<bool>();
    }
    return script;
}

SimulationScript load_simulation(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return simulation_from_json(j);
}

RunResult run_simulation(const SimulationScript& script,
                         const std::filesystem::path& work_dir) {
    CorpusStore store(work_dir / "store");
    for (const auto& [lang, docs] : script.corpora) {
        store.ingest_documents(lang, docs, script.config.chunking);
    }
    VectorIndex index(work_dir / "index",
                      std::make_shared<HashedNgramEmbedder>(
                          static_cast<std::size_t>(script.config.embedding.dim)));
    for (const auto& [lang, docs] : script.corpora) {
        (void)docs;
        index.build_shard(store, lang);
    }
    auto backend = std::make_shared<ScriptedBackend>(script.exchanges);
    AgentGateway gateway(backend, script.config.roles);

    RunResult run;
    if (script.method == "coral") {
        CoralEngine engine(store, index, gateway, script.config.loop);
        run = engine.run_query(script.query);
    } else {
        BaselinePipeline pipeline(store, index, gateway, script.config.loop);
        BaselineSpec spec;
        spec.kind = *parse_baseline(script.method);
        spec.query_lang = script.query_lang;
        spec.scope = script.scope;
        run = pipeline.run(script.query, spec);
    }
    if (script.require_exhausted && !backend->exhausted()) {
        throw ScriptError("simulation left " +
                          std::to_string(script.exchanges.size() - backend->consumed()) +
                          " scripted exchange(s) unconsumed");
    }
    return run;
}

} // namespace coral
