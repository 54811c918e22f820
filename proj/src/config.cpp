#include "coral/config.hpp"

#include <cmath>
#include <set>

#include "coral/errors.hpp"
#include "coral/evalkit.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

constexpr AgentRole kAllRoles[] = {AgentRole::planner, AgentRole::critic, AgentRole::sufficiency,
                                   AgentRole::generator, AgentRole::translator};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void expect_object(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path, "expected a JSON object");
    }
}

void reject_unknown(const nlohmann::json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* candidate : allowed) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(path.empty() ? key : path + "." + key, "unknown key");
        }
    }
}

std::string key_path(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

void read_string(const nlohmann::json& j, const std::string& path, const char* key,
                 std::string& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_string()) {
        fail(key_path(path, key), "expected a string");
    }
    out = j.at(key).get<std::string>();
}

void read_bool(const nlohmann::json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_boolean()) {
        fail(key_path(path, key), "expected a boolean");
    }
    out = j.at(key).get<bool>();
}

template <typename Int>
void read_int(const nlohmann::json& j, const std::string& path, const char* key, Int& out,
              long long min_value) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_number_integer()) {
        fail(key_path(path, key), "expected an integer");
    }
    const long long value = j.at(key).get<long long>();
    if (value < min_value) {
        fail(key_path(path, key), "must be >= " + std::to_string(min_value));
    }
    out = static_cast<Int>(value);
}

void read_double(const nlohmann::json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) {
        return;
    }
    if (!j.at(key).is_number()) {
        fail(key_path(path, key), "expected a number");
    }
    out = j.at(key).get<double>();
}

// Points -> doubled integer; rejects anything that is not a non-negative
// multiple of 0.5.
int read_half_points(const nlohmann::json& j, const std::string& path, const char* key,
                     int current_x2) {
    if (!j.contains(key)) {
        return current_x2;
    }
    if (!j.at(key).is_number()) {
        fail(key_path(path, key), "expected a number");
    }
    const double value = j.at(key).get<double>();
    const double doubled = value * 2.0;
    const long long rounded = std::llround(doubled);
    if (value < 0.0 || std::abs(doubled - static_cast<double>(rounded)) > 1e-9) {
        fail(key_path(path, key), "must be a non-negative multiple of 0.5");
    }
    return static_cast<int>(rounded);
}

Lang read_lang_code(const nlohmann::json& entry, const std::string& path) {
    if (!entry.is_string()) {
        fail(path, "expected a language code string");
    }
    const std::string code = entry.get<std::string>();
    const auto lang = parse_lang(code);
    if (!lang.has_value()) {
        fail(path, "unknown language '" + code + "'");
    }
    return *lang;
}

void parse_chat(const nlohmann::json& j, ChatSettings& out) {
    expect_object(j, "chat");
    reject_unknown(j, "chat", {"base_url", "path", "api_key_env", "default_model", "models"});
    read_string(j, "chat", "base_url", out.base_url);
    read_string(j, "chat", "path", out.path);
    read_string(j, "chat", "api_key_env", out.api_key_env);
    read_string(j, "chat", "default_model", out.default_model);
    if (j.contains("models")) {
        expect_object(j.at("models"), "chat.models");
        for (const auto& [key, value] : j.at("models").items()) {
            const auto role = parse_role(key);
            if (!role.has_value()) {
                fail("chat.models." + key, "unknown role");
            }
            if (!value.is_string()) {
                fail("chat.models." + key, "expected a string");
            }
            out.models[*role] = value.get<std::string>();
        }
    }
}

void parse_embedding(const nlohmann::json& j, EmbeddingSettings& out) {
    expect_object(j, "embedding");
    reject_unknown(j, "embedding", {"backend", "dim", "base_url", "path", "api_key_env", "model"});
    read_string(j, "embedding", "backend", out.backend);
    if (out.backend != "hashed" && out.backend != "http") {
        fail("embedding.backend", "must be 'hashed' or 'http'");
    }
    read_int(j, "embedding", "dim", out.dim, 1);
    read_string(j, "embedding", "base_url", out.base_url);
    read_string(j, "embedding", "path", out.path);
    read_string(j, "embedding", "api_key_env", out.api_key_env);
    read_string(j, "embedding", "model", out.model);
}

void parse_roles(const nlohmann::json& j, std::map<AgentRole, RoleParams>& out) {
    expect_object(j, "roles");
    for (const auto& [key, value] : j.items()) {
        const auto role = parse_role(key);
        if (!role.has_value()) {
            fail("roles." + key, "unknown role");
        }
        const std::string path = "roles." + key;
        expect_object(value, path);
        reject_unknown(value, path, {"temperature", "top_p", "max_tokens", "effort_tag"});
        RoleParams& params = out[*role];
        read_double(value, path, "temperature", params.temperature);
        read_double(value, path, "top_p", params.top_p);
        read_int(value, path, "max_tokens", params.max_tokens, 1);
        read_string(value, path, "effort_tag", params.effort_tag);
        if (params.temperature < 0.0) {
            fail(path + ".temperature", "must be >= 0");
        }
        if (params.top_p <= 0.0 || params.top_p > 1.0) {
            fail(path + ".top_p", "must be in (0, 1]");
        }
    }
}

void parse_loop(const nlohmann::json& j, LoopConfig& out) {
    expect_object(j, "loop");
    reject_unknown(j, "loop",
                   {"k_per_corpus", "final_k", "max_iterations", "enable_query_rewrite",
                    "enable_dynamic_corpora", "fixed_langs", "per_criterion_min", "total_min",
                    "weights", "evidence_char_limit"});
    read_int(j, "loop", "k_per_corpus", out.k_per_corpus, 1);
    read_int(j, "loop", "final_k", out.final_k, 1);
    read_int(j, "loop", "max_iterations", out.max_iterations, 1);
    read_bool(j, "loop", "enable_query_rewrite", out.enable_query_rewrite);
    read_bool(j, "loop", "enable_dynamic_corpora", out.enable_dynamic_corpora);
    if (j.contains("fixed_langs")) {
        if (!j.at("fixed_langs").is_array()) {
            fail("loop.fixed_langs", "expected an array");
        }
        out.fixed_langs.clear();
        std::size_t i = 0;
        for (const auto& entry : j.at("fixed_langs")) {
            out.fixed_langs.push_back(
                read_lang_code(entry, "loop.fixed_langs[" + std::to_string(i) + "]"));
            ++i;
        }
    }
    read_int(j, "loop", "per_criterion_min", out.thresholds.per_criterion_min, 0);
    if (out.thresholds.per_criterion_min > 5) {
        fail("loop.per_criterion_min", "must be <= 5");
    }
    out.thresholds.total_min_x2 =
        read_half_points(j, "loop", "total_min", out.thresholds.total_min_x2);
    if (j.contains("weights")) {
        const nlohmann::json& w = j.at("weights");
        expect_object(w, "loop.weights");
        reject_unknown(w, "loop.weights",
                       {"relevance", "usefulness", "clarity_specificity", "compatibility"});
        out.weights.relevance = read_half_points(w, "loop.weights", "relevance",
                                                 out.weights.relevance);
        out.weights.usefulness = read_half_points(w, "loop.weights", "usefulness",
                                                  out.weights.usefulness);
        out.weights.clarity_specificity = read_half_points(
            w, "loop.weights", "clarity_specificity", out.weights.clarity_specificity);
        out.weights.compatibility = read_half_points(w, "loop.weights", "compatibility",
                                                     out.weights.compatibility);
    }
    read_int(j, "loop", "evidence_char_limit", out.evidence_char_limit, 1);
}

void parse_tiers(const nlohmann::json& j, std::map<Lang, std::string>& tiers, std::string& note) {
    expect_object(j, "tiers");
    tiers.clear();
    for (const auto& [label, value] : j.items()) {
        if (label == "note") {
            if (!value.is_string()) {
                fail("tiers.note", "expected a string");
            }
            note = value.get<std::string>();
            continue;
        }
        if (!value.is_array()) {
            fail("tiers." + label, "expected an array of language codes");
        }
        std::size_t i = 0;
        for (const auto& entry : value) {
            const Lang lang =
                read_lang_code(entry, "tiers." + label + "[" + std::to_string(i) + "]");
            if (tiers.count(lang)) {
                fail("tiers." + label,
                     "language '" + std::string(lang_code(lang)) + "' assigned to two tiers");
            }
            tiers[lang] = label;
            ++i;
        }
    }
}

void parse_http(const nlohmann::json& j, HttpSettings& out) {
    expect_object(j, "http");
    reject_unknown(j, "http", {"max_retries", "backoff_ms", "timeout_sec"});
    read_int(j, "http", "max_retries", out.max_retries, 0);
    read_int(j, "http", "backoff_ms", out.backoff_ms, 0);
    read_int(j, "http", "timeout_sec", out.timeout_sec, 1);
}

void parse_paths(const nlohmann::json& j, PathSettings& out) {
    expect_object(j, "paths");
    reject_unknown(j, "paths", {"store_dir", "index_dir", "trace_dir"});
    read_string(j, "paths", "store_dir", out.store_dir);
    read_string(j, "paths", "index_dir", out.index_dir);
    read_string(j, "paths", "trace_dir", out.trace_dir);
}

} // namespace

EngineConfig::EngineConfig() {
    for (AgentRole role : kAllRoles) {
        roles[role] = default_role_params(role);
    }
    tiers = default_tier_map();
    tiers_note = "editorial grouping by available corpus resources";
}

EngineConfig config_from_json(const nlohmann::json& j, const EngineConfig& base) {
    expect_object(j, "");
    reject_unknown(j, "",
                   {"chat", "embedding", "roles", "loop", "chunking", "tiers", "http", "paths",
                    "concurrency"});
    EngineConfig config = base;
    if (j.contains("chat")) {
        parse_chat(j.at("chat"), config.chat);
    }
    if (j.contains("embedding")) {
        parse_embedding(j.at("embedding"), config.embedding);
    }
    if (j.contains("roles")) {
        parse_roles(j.at("roles"), config.roles);
    }
    if (j.contains("loop")) {
        parse_loop(j.at("loop"), config.loop);
    }
    if (j.contains("chunking")) {
        const nlohmann::json& c = j.at("chunking");
        expect_object(c, "chunking");
        reject_unknown(c, "chunking", {"max_chars", "overlap_chars"});
        read_int(c, "chunking", "max_chars", config.chunking.max_chars, 1);
        read_int(c, "chunking", "overlap_chars", config.chunking.overlap_chars, 0);
        if (config.chunking.max_chars <= config.chunking.overlap_chars) {
            fail("chunking.max_chars", "must exceed overlap_chars");
        }
    }
    if (j.contains("tiers")) {
        parse_tiers(j.at("tiers"), config.tiers, config.tiers_note);
    }
    if (j.contains("http")) {
        parse_http(j.at("http"), config.http);
    }
    if (j.contains("paths")) {
        parse_paths(j.at("paths"), config.paths);
    }
    read_int(j, "", "concurrency", config.concurrency, 1);
    return config;
}

EngineConfig load_config(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json serialize_config(const EngineConfig& config) {
    nlohmann::json j;

    j["chat"] = {{"base_url", config.chat.base_url},
                 {"path", config.chat.path},
                 {"api_key_env", config.chat.api_key_env},
                 {"default_model", config.chat.default_model}};
    nlohmann::json models = nlohmann::json::object();
    for (const auto& [role, model] : config.chat.models) {
        models[std::string(role_name(role))] = model;
    }
    j["chat"]["models"] = models;

    j["embedding"] = {{"backend", config.embedding.backend}, {"dim", config.embedding.dim},
                      {"base_url", config.embedding.base_url}, {"path", config.embedding.path},
                      {"api_key_env", config.embedding.api_key_env},
                      {"model", config.embedding.model}};

    j["roles"] = nlohmann::json::object();
    for (const auto& [role, params] : config.roles) {
        j["roles"][std::string(role_name(role))] = {{"temperature", params.temperature},
                                                    {"top_p", params.top_p},
                                                    {"max_tokens", params.max_tokens},
                                                    {"effort_tag", params.effort_tag}};
    }

    nlohmann::json fixed = nlohmann::json::array();
    for (Lang lang : config.loop.fixed_langs) {
        fixed.push_back(std::string(lang_code(lang)));
    }
    j["loop"] = {{"k_per_corpus", config.loop.k_per_corpus},
                 {"final_k", config.loop.final_k},
                 {"max_iterations", config.loop.max_iterations},
                 {"enable_query_rewrite", config.loop.enable_query_rewrite},
                 {"enable_dynamic_corpora", config.loop.enable_dynamic_corpora},
                 {"fixed_langs", fixed},
                 {"per_criterion_min", config.loop.thresholds.per_criterion_min},
                 {"total_min", config.loop.thresholds.total_min_x2 / 2.0},
                 {"weights",
                  {{"relevance", config.loop.weights.relevance / 2.0},
                   {"usefulness", config.loop.weights.usefulness / 2.0},
                   {"clarity_specificity", config.loop.weights.clarity_specificity / 2.0},
                   {"compatibility", config.loop.weights.compatibility / 2.0}}},
                 {"evidence_char_limit", config.loop.evidence_char_limit}};

    j["chunking"] = {{"max_chars", config.chunking.max_chars},
                     {"overlap_chars", config.chunking.overlap_chars}};

    nlohmann::json tiers = nlohmann::json::object();
    if (!config.tiers_note.empty()) {
        tiers["note"] = config.tiers_note;
    }
    for (const auto& [lang, label] : config.tiers) {
        tiers[label].push_back(std::string(lang_code(lang)));
    }
    j["tiers"] = tiers;

    j["http"] = {{"max_retries", config.http.max_retries},
                 {"backoff_ms", config.http.backoff_ms},
                 {"timeout_sec", config.http.timeout_sec}};
    j["paths"] = {{"store_dir", config.paths.store_dir},
                  {"index_dir", config.paths.index_dir},
                  {"trace_dir", config.paths.trace_dir}};
    j["concurrency"] = config.concurrency;
    return j;
}

void save_config(const std::filesystem::path& path, const EngineConfig& config) {
    write_file_bytes(path, serialize_config(config).dump(2) + "\n");
}

} // namespace coral
