#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coral/baselines.hpp"
#include "coral/config.hpp"
#include "coral/embedding.hpp"
#include "coral/errors.hpp"
#include "coral/evalkit.hpp"
#include "coral/gateway.hpp"
#include "coral/http_chat.hpp"
#include "coral/loop.hpp"
#include "coral/simulate.hpp"
#include "coral/trace.hpp"
#include "coral/util.hpp"
#include "coral/vector_index.hpp"

namespace fs = std::filesystem;
using namespace coral;

namespace {

EngineConfig load_cfg(const std::string& config_path) {
    if (config_path.empty()) {
        return EngineConfig{};
    }
    return load_config(config_path);
}

std::string env_or_empty(const std::string& name) {
    if (name.empty()) {
        return {};
    }
    const char* value = std::getenv(name.c_str());
    return value ? value : "";
}

std::shared_ptr<EmbeddingBackend> make_embedder(const EngineConfig& cfg) {
    if (cfg.embedding.backend == "hashed") {
        return std::make_shared<HashedNgramEmbedder>(static_cast<std::size_t>(cfg.embedding.dim));
    }
    if (cfg.embedding.base_url.empty()) {
        throw ConfigError("embedding.base_url is required for the http backend");
    }
    HttpEndpointConfig endpoint;
    endpoint.base_url = cfg.embedding.base_url;
    endpoint.path = cfg.embedding.path;
    endpoint.model = cfg.embedding.model;
    endpoint.api_key = env_or_empty(cfg.embedding.api_key_env);
    endpoint.max_retries = cfg.http.max_retries;
    endpoint.backoff_ms = cfg.http.backoff_ms;
    endpoint.timeout_sec = cfg.http.timeout_sec;
    return std::make_shared<HttpEmbeddingClient>(endpoint);
}

std::vector<ScriptedExchange> load_exchanges(const std::string& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return ScriptedBackend::parse_exchanges(j);
}

std::shared_ptr<AgentBackend> make_chat_backend(const EngineConfig& cfg) {
    if (cfg.chat.base_url.empty()) {
        throw ConfigError("chat.base_url is required when no --script is given");
    }
    ChatBackendConfig backend;
    backend.endpoint.base_url = cfg.chat.base_url;
    backend.endpoint.path = cfg.chat.path;
    backend.endpoint.api_key = env_or_empty(cfg.chat.api_key_env);
    backend.endpoint.max_retries = cfg.http.max_retries;
    backend.endpoint.backoff_ms = cfg.http.backoff_ms;
    backend.endpoint.timeout_sec = cfg.http.timeout_sec;
    backend.default_model = cfg.chat.default_model;
    backend.models = cfg.chat.models;
    return std::make_shared<HttpChatBackend>(backend);
}

std::vector<Lang> parse_scope_csv(const std::string& csv) {
    std::vector<Lang> scope;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        if (begin == std::string::npos) {
            continue;
        }
        const auto end = item.find_last_not_of(" \t");
        const std::string code = item.substr(begin, end - begin + 1);
        const auto lang = parse_lang(code);
        if (!lang.has_value()) {
            throw ConfigError("--scope: unknown language '" + code + "'");
        }
        scope.push_back(*lang);
    }
    return scope;
}

Lang parse_lang_flag(const std::string& code, const std::string& flag) {
    const auto lang = parse_lang(code);
    if (!lang.has_value()) {
        throw ConfigError(flag + ": unknown language '" + code + "'");
    }
    return *lang;
}

RunResult dispatch_run(const CorpusStore& store, VectorIndex& index, AgentGateway& gateway,
                       const LoopConfig& loop, const std::string& method,
                       const std::string& query, Lang query_lang,
                       const std::vector<Lang>& scope) {
    if (method == "coral") {
        CoralEngine engine(store, index, gateway, loop);
        return engine.run_query(query);
    }
    const auto kind = parse_baseline(method);
    if (!kind.has_value()) {
        throw ConfigError("unknown method '" + method + "'");
    }
    BaselinePipeline pipeline(store, index, gateway, loop);
    BaselineSpec spec;
    spec.kind = *kind;
    spec.query_lang = query_lang;
    spec.scope = scope;
    return pipeline.run(query, spec);
}

void print_run(const RunResult& run) {
    std::cout << "method: " << run.method << "\n";
    std::cout << "answer: " << (run.answer.has_value() ? std::string(1, *run.answer) : "(none)")
              << "\n";
    std::cout << "iterations: " << run.iterations_run << "\n";
    std::cout << "evidence: " << run.evidence_used.size() << "\n";
    std::cout << "tokens: " << run.prompt_tokens << " prompt, " << run.completion_tokens
              << " completion\n";
    if (!run.flags.empty()) {
        std::cout << "flags: ";
        for (std::size_t i = 0; i < run.flags.size(); ++i) {
            std::cout << (i ? ", " : "") << run.flags[i];
        }
        std::cout << "\n";
    }
    std::cout << "reply:\n" << run.answer_text << "\n";
}

std::string sanitize_uid(const std::string& uid) {
    std::string out = uid;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) {
            c = '_';
        }
    }
    return out.empty() ? "run" : out;
}

// Scratch directory removed on scope exit unless the caller supplied one.
struct ScratchDir {
    fs::path path;
    bool owned = false;

    ~ScratchDir() {
        if (owned) {
            std::error_code ec;
            fs::remove_all(path, ec);
        }
    }
};

ScratchDir make_scratch(const std::string& requested) {
    if (!requested.empty()) {
        fs::create_directories(requested);
        return {fs::path(requested), false};
    }
    std::random_device rd;
    std::ostringstream name;
    name << "coral_sim_" << std::hex << rd() << rd();
    fs::path path = fs::temp_directory_path() / name.str();
    fs::create_directories(path);
    return {path, true};
}

struct IngestOptions {
    std::string store_dir;
    std::string lang;
    std::string input;
    std::string config_path;
};

int cmd_ingest(const IngestOptions& opt) {
    const EngineConfig cfg = load_cfg(opt.config_path);
    CorpusStore store(opt.store_dir);
    const CorpusManifest manifest =
        store.ingest_jsonl(opt.input, parse_lang_flag(opt.lang, "--lang"), cfg.chunking);
    std::cout << "ingested " << lang_code(manifest.lang) << ": " << manifest.doc_count
              << " docs, " << manifest.chunk_count << " chunks, digest "
              << manifest.content_digest << "\n";
    return 0;
}

struct IndexOptions {
    std::string store_dir;
    std::string index_dir;
    std::vector<std::string> langs;
    std::string config_path;
};

int cmd_index(const IndexOptions& opt) {
    const EngineConfig cfg = load_cfg(opt.config_path);
    CorpusStore store(opt.store_dir);
    VectorIndex index(opt.index_dir, make_embedder(cfg));
    std::vector<Lang> langs;
    if (opt.langs.empty()) {
        for (const CorpusManifest& manifest : store.list_corpora()) {
            langs.push_back(manifest.lang);
        }
    } else {
        for (const std::string& code : opt.langs) {
            langs.push_back(parse_lang_flag(code, "--lang"));
        }
    }
    if (langs.empty()) {
        throw ConfigError("store has no corpora to index");
    }
    for (Lang lang : langs) {
        const IndexShard& shard = index.build_shard(store, lang);
        std::cout << "indexed " << lang_code(lang) << ": " << shard.row_map.size()
                  << " rows, dim " << shard.dim << "\n";
    }
    return 0;
}

struct RunOptions {
    std::string query;
    std::string method = "coral";
    std::string query_lang = "en";
    std::string scope_csv;
    std::string config_path;
    std::string store_dir;
    std::string index_dir;
    std::string script_path;
    std::string trace_out;
};

int cmd_run(const RunOptions& opt) {
    const EngineConfig cfg = load_cfg(opt.config_path);
    const std::string store_dir = opt.store_dir.empty() ? cfg.paths.store_dir : opt.store_dir;
    const std::string index_dir = opt.index_dir.empty() ? cfg.paths.index_dir : opt.index_dir;
    CorpusStore store(store_dir);
    VectorIndex index(index_dir, make_embedder(cfg));
    if (fs::exists(index_dir)) {
        index.load_all_shards();
    }
    std::shared_ptr<AgentBackend> backend;
    std::shared_ptr<ScriptedBackend> scripted;
    if (!opt.script_path.empty()) {
        scripted = std::make_shared<ScriptedBackend>(load_exchanges(opt.script_path));
        backend = scripted;
    } else {
        backend = make_chat_backend(cfg);
    }
    AgentGateway gateway(backend, cfg.roles);
    const RunResult run =
        dispatch_run(store, index, gateway, cfg.loop, opt.method, opt.query,
                     parse_lang_flag(opt.query_lang, "--query-lang"), parse_scope_csv(opt.scope_csv));
    print_run(run);
    if (!opt.trace_out.empty()) {
        write_trace(opt.trace_out, run, serialize_config(cfg));
        std::cout << "trace written to " << opt.trace_out << "\n";
    }
    return 0;
}

struct EvalOptions {
    std::string dataset;
    std::string data_path;
    std::string method = "coral";
    std::size_t limit = 0;
    std::string scope_csv;
    std::string config_path;
    std::string store_dir;
    std::string index_dir;
    std::string script_path;
    std::string report_out;
    std::string trace_dir;
};

int cmd_eval(const EvalOptions& opt) {
    const EngineConfig cfg = load_cfg(opt.config_path);
    std::vector<McqInstance> instances = opt.dataset == "blend"
                                             ? load_blend(opt.data_path, cfg.tiers)
                                             : load_click(opt.data_path, cfg.tiers);
    if (opt.limit > 0 && instances.size() > opt.limit) {
        instances.resize(opt.limit);
    }
    const std::string store_dir = opt.store_dir.empty() ? cfg.paths.store_dir : opt.store_dir;
    const std::string index_dir = opt.index_dir.empty() ? cfg.paths.index_dir : opt.index_dir;
    CorpusStore store(store_dir);
    VectorIndex index(index_dir, make_embedder(cfg));
    if (fs::exists(index_dir)) {
        index.load_all_shards();
    }
    const std::vector<Lang> scope = parse_scope_csv(opt.scope_csv);

    // Scripted runs replay the same transcript from the top for every
    // instance; a live backend is shared.
    std::vector<ScriptedExchange> exchanges;
    std::shared_ptr<AgentBackend> live_backend;
    if (!opt.script_path.empty()) {
        exchanges = load_exchanges(opt.script_path);
    } else {
        live_backend = make_chat_backend(cfg);
    }

    if (!opt.trace_dir.empty()) {
        fs::create_directories(opt.trace_dir);
    }
    const nlohmann::json config_header = serialize_config(cfg);

    std::vector<RunResult> results;
    results.reserve(instances.size());
    for (const McqInstance& instance : instances) {
        std::shared_ptr<AgentBackend> backend = live_backend;
        if (!opt.script_path.empty()) {
            backend = std::make_shared<ScriptedBackend>(exchanges);
        }
        AgentGateway gateway(backend, cfg.roles);
        RunResult run = dispatch_run(store, index, gateway, cfg.loop, opt.method,
                                     instance.question, instance.source_lang, scope);
        run.uid = instance.uid;
        if (!opt.trace_dir.empty()) {
            write_trace(fs::path(opt.trace_dir) / (sanitize_uid(instance.uid) + ".json"), run,
                        config_header);
        }
        results.push_back(std::move(run));
    }

    const EvalReport report = score_batch(instances, results);
    std::cout << render_report_table({report});
    if (!opt.report_out.empty()) {
        write_file_bytes(opt.report_out, report_to_json(report).dump(2) + "\n");
        std::cout << "report written to " << opt.report_out << "\n";
    }
    return 0;
}

struct ReportOptions {
    std::vector<std::string> inputs;
};

int cmd_report(const ReportOptions& opt) {
    std::vector<EvalReport> reports;
    for (const std::string& path : opt.inputs) {
        const std::string bytes = read_file_bytes(path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(bytes);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path + ": " + e.what());
        }
        reports.push_back(report_from_json(j));
    }
    std::cout << render_report_table(reports);
    return 0;
}

struct SimulateOptions {
    std::string script_path;
    std::string trace_out;
    std::string work_dir;
};

int cmd_simulate(const SimulateOptions& opt) {
    const SimulationScript script = load_simulation(opt.script_path);
    const ScratchDir scratch = make_scratch(opt.work_dir);
    const RunResult run = run_simulation(script, scratch.path);
    print_run(run);
    const std::string trace_out = opt.trace_out.empty() ? script.trace_out : opt.trace_out;
    if (!trace_out.empty()) {
        write_trace(trace_out, run, serialize_config(script.config));
        std::cout << "trace written to " << trace_out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feedback-driven multilingual retrieval engine"};
    app.require_subcommand(1);
    int seed = 0;
    app.add_option("--seed", seed, "reserved; current runs are deterministic");

    IngestOptions ingest_opt;
    CLI::App* ingest = app.add_subcommand("ingest", "Chunk a JSONL document file into the store");
    ingest->add_option("--store", ingest_opt.store_dir, "store directory")->required();
    ingest->add_option("--lang", ingest_opt.lang, "corpus language code")->required();
    ingest->add_option("--input", ingest_opt.input, "JSONL file: one {id?, title?, text} per line")
        ->required();
    ingest->add_option("--config", ingest_opt.config_path, "engine config JSON");

    IndexOptions index_opt;
    CLI::App* index = app.add_subcommand("index", "Embed stored chunks into per-language shards");
    index->add_option("--store", index_opt.store_dir, "store directory")->required();
    index->add_option("--index", index_opt.index_dir, "index directory")->required();
    index->add_option("--lang", index_opt.langs, "language code (repeatable; default: all)");
    index->add_option("--config", index_opt.config_path, "engine config JSON");

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "Answer one query");
    run->add_option("--query", run_opt.query, "query text")->required();
    run->add_option("--method", run_opt.method,
                    "coral | non_rag | mono_rag | t_rag | multi_rag | cross_rag | fixed_scope");
    run->add_option("--query-lang", run_opt.query_lang, "query language (mono_rag retrieval)");
    run->add_option("--scope", run_opt.scope_csv, "comma-separated codes (fixed_scope)");
    run->add_option("--config", run_opt.config_path, "engine config JSON");
    run->add_option("--store", run_opt.store_dir, "store directory (default: config paths)");
    run->add_option("--index", run_opt.index_dir, "index directory (default: config paths)");
    run->add_option("--script", run_opt.script_path, "scripted agent transcript JSON");
    run->add_option("--trace-out", run_opt.trace_out, "write the run trace here");

    EvalOptions eval_opt;
    CLI::App* eval = app.add_subcommand("eval", "Score a benchmark file");
    eval->add_option("--dataset", eval_opt.dataset, "blend | click")
        ->required()
        ->check(CLI::IsMember({"blend", "click"}));
    eval->add_option("--data", eval_opt.data_path, "benchmark JSON file")->required();
    eval->add_option("--method", eval_opt.method, "pipeline to evaluate");
    eval->add_option("--limit", eval_opt.limit, "evaluate only the first N instances");
    eval->add_option("--scope", eval_opt.scope_csv, "comma-separated codes (fixed_scope)");
    eval->add_option("--config", eval_opt.config_path, "engine config JSON");
    eval->add_option("--store", eval_opt.store_dir, "store directory (default: config paths)");
    eval->add_option("--index", eval_opt.index_dir, "index directory (default: config paths)");
    eval->add_option("--script", eval_opt.script_path,
                     "scripted transcript, replayed from the top for each instance");
    eval->add_option("--out", eval_opt.report_out, "write the report JSON here");
    eval->add_option("--trace-dir", eval_opt.trace_dir, "write one trace per instance here");

    ReportOptions report_opt;
    CLI::App* report = app.add_subcommand("report", "Render saved reports side by side");
    report->add_option("--in", report_opt.inputs, "report JSON (repeatable)")->required();

    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a self-contained scripted scenario");
    simulate->add_option("--script", sim_opt.script_path, "simulation script JSON")->required();
    simulate->add_option("--trace-out", sim_opt.trace_out, "override the script's trace_out");
    simulate->add_option("--work-dir", sim_opt.work_dir,
                         "scratch directory (default: a temp dir, removed afterwards)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) {
            return cmd_ingest(ingest_opt);
        }
        if (index->parsed()) {
            return cmd_index(index_opt);
        }
        if (run->parsed()) {
            return cmd_run(run_opt);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_opt);
        }
        if (report->parsed()) {
            return cmd_report(report_opt);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
