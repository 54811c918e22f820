#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "coral/baselines.hpp"
#include "coral/config.hpp"
#include "coral/loop.hpp"

namespace coral {

// A fully offline run in one file: inline corpora, a scripted agent
// transcript, and strict config overrides. Used for reproducible fixtures
// and end-to-end checks without a live endpoint.
struct SimulationScript {
    std::string query;
    Lang query_lang = Lang::en; // retrieval language for the mono pipeline
    std::string method = "coral";
    std::vector<Lang> scope; // fixed-scope pipeline only
    EngineConfig config;
    std::vector<std::pair<Lang, std::vector<DocumentRecord>>> corpora;
    std::vector<ScriptedExchange> exchanges;
    std::string trace_out; // optional trace destination
    bool require_exhausted = true; // leftover scripted exchanges are an error
};

// Strict: unknown keys anywhere raise ConfigError with the key path; the
// "config" block is applied onto defaults via config_from_json.
SimulationScript simulation_from_json(const nlohmann::json& j);
SimulationScript load_simulation(const std::filesystem::path& path);

// Ingests the inline corpora into a scratch store under work_dir, builds
// shards with the deterministic hashed embedder, and runs the scripted
// query. The result never depends on where work_dir lives.
RunResult run_simulation(const SimulationScript& script,
                         const std::filesystem::path& work_dir);

} // namespace coral
