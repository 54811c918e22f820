#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coral/lang.hpp"
#include "coral/loop.hpp"

namespace coral {

struct McqInstance {
    std::string uid;
    std::string dataset;  // "blend" or "click"
    std::string question; // full prompt text including the lettered options
    std::map<char, std::string> options; // 'A'..'E', 2 to 5 entries
    char gold = 'A';
    Lang source_lang = Lang::en;
    std::string group; // BLEnD country / CLIcK category
    std::string tier;  // resource tier label from the tier mapping
};

// Scans the reply from the last line upward for "Answer:" (any case),
// optional whitespace, then a letter A-E on a word boundary. Absent or
// malformed means no answer.
std::optional<char> extract_answer(const std::string& raw);

// Editorial resource-tier assignment; overridable in config.
const std::map<Lang, std::string>& default_tier_map();

// Benchmark loaders. Each takes the dataset's JSON file (layout documented in
// the repo README) and validates per-instance schema; errors carry the uid.
std::vector<McqInstance> load_blend(const std::filesystem::path& path,
                                    const std::map<Lang, std::string>& tier_map = default_tier_map());
std::vector<McqInstance> load_click(const std::filesystem::path& path,
                                    const std::map<Lang, std::string>& tier_map = default_tier_map());

struct GroupStats {
    int total = 0;
    int correct = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    std::string method;
    std::string dataset;
    int total = 0;
    int correct = 0;
    double overall_accuracy = 0.0;
    std::map<std::string, GroupStats> per_lang;  // key: language code
    std::map<std::string, GroupStats> per_group; // key: country / category
    std::map<std::string, double> tier_accuracy; // unweighted mean over member languages
    double mean_iterations = 0.0;
    double mean_final_evidence_iteration = 0.0;
    double mean_prompt_tokens = 0.0;
    double mean_completion_tokens = 0.0;
    std::map<std::string, int> planner_lang_counts;  // plan selections, completed rounds
    std::map<std::string, int> evidence_lang_counts; // languages of final evidence
};

// Results must be positionally aligned with instances (uid checked).
EvalReport score_batch(const std::vector<McqInstance>& instances,
                       const std::vector<RunResult>& results);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// Side-by-side text table, one column per report.
std::string render_report_table(const std::vector<EvalReport>& reports);

} // namespace coral
