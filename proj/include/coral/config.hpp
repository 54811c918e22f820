#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "coral/chunking.hpp"
#include "coral/gateway.hpp"
#include "coral/lang.hpp"
#include "coral/loop.hpp"

namespace coral {

struct ChatSettings {
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string api_key_env;
    std::string default_model;
    std::map<AgentRole, std::string> models; // per-role overrides

    bool operator==(const ChatSettings&) const = default;
};

struct EmbeddingSettings {
    std::string backend = "hashed"; // "hashed" | "http"
    std::size_t dim = 256;          // hashed backend only
    std::string base_url;
    std::string path = "/v1/embeddings";
    std::string api_key_env;
    std::string model;

    bool operator==(const EmbeddingSettings&) const = default;
};

struct HttpSettings {
    int max_retries = 3;
    int backoff_ms = 250;
    int timeout_sec = 120;

    bool operator==(const HttpSettings&) const = default;
};

struct PathSettings {
    std::string store_dir = "data/store";
    std::string index_dir = "data/index";
    std::string trace_dir = "data/traces";

    bool operator==(const PathSettings&) const = default;
};

struct EngineConfig {
    EngineConfig(); // fills role params and the tier map with defaults

    ChatSettings chat;
    EmbeddingSettings embedding;
    std::map<AgentRole, RoleParams> roles; // always all five roles
    LoopConfig loop;
    ChunkPolicy chunking;
    std::map<Lang, std::string> tiers;
    std::string tiers_note; // free-text annotation carried through round trips
    HttpSettings http;
    PathSettings paths;
    int concurrency = 1;

    bool operator==(const EngineConfig&) const = default;
};

// Applies a JSON object on top of `base`. Strict: an unknown key anywhere is
// a ConfigError naming the full key path; so is any out-of-range value.
// Aggregate weights and the validity total are given in points and must be
// non-negative multiples of 0.5 (they are stored doubled).
EngineConfig config_from_json(const nlohmann::json& j, const EngineConfig& base = {});

EngineConfig load_config(const std::filesystem::path& path);

// Complete inverse of config_from_json: config_from_json(serialize_config(c))
// reproduces c exactly.
nlohmann::json serialize_config(const EngineConfig& config);

void save_config(const std::filesystem::path& path, const EngineConfig& config);

} // namespace coral
