#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "coral/loop.hpp"

namespace coral {

// Full-fidelity serialization: run_from_json(run_to_json(r)) == r for every
// field, including the per-iteration trace. Malformed input throws ParseError
// naming the offending key.
nlohmann::json run_to_json(const RunResult& run);
RunResult run_from_json(const nlohmann::json& j);

struct TraceFile {
    nlohmann::json config; // engine configuration the run used
    RunResult run;
};

// Writes {"config": ..., "run": ...} pretty-printed with a trailing newline.
void write_trace(const std::filesystem::path& path, const RunResult& run,
                 const nlohmann::json& config_header);

TraceFile read_trace(const std::filesystem::path& path);

} // namespace coral
