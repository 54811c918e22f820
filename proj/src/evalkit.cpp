#include "coral/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "coral/errors.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool matches_answer_tag(const std::string& line, std::size_t pos) {
    static constexpr const char* kTag = "answer:";
    for (std::size_t i = 0; i < 7; ++i) {
        if (std::tolower(static_cast<unsigned char>(line[pos + i])) != kTag[i]) {
            return false;
        }
    }
    return true;
}

std::optional<char> scan_line(const std::string& line) {
    if (line.size() < 8) {
        return std::nullopt;
    }
    for (std::size_t pos = 0; pos + 8 <= line.size(); ++pos) {
        if (!matches_answer_tag(line, pos)) {
            continue;
        }
        if (pos > 0 && is_word_char(line[pos - 1])) {
            continue; // "...transanswer:" is not the tag
        }
        std::size_t p = pos + 7;
        while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) {
            ++p;
        }
        if (p >= line.size()) {
            continue;
        }
        const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(line[p])));
        if (upper < 'A' || upper > 'E') {
            continue;
        }
        if (p + 1 < line.size() && is_word_char(line[p + 1])) {
            continue; // "Answer: Apple" names no option
        }
        return upper;
    }
    return std::nullopt;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

nlohmann::json load_array(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError(path.string() + ": expected a JSON array of instances");
    }
    return doc;
}

std::string require_string(const nlohmann::json& item, const char* key, const std::string& where) {
    if (!item.contains(key) || !item.at(key).is_string() ||
        item.at(key).get<std::string>().empty()) {
        throw ParseError(where + ": missing or empty string field '" + key + "'");
    }
    return item.at(key).get<std::string>();
}

// Options must be lettered contiguously from 'A' (2 to 5 of them); the gold
// answer must name one of them.
void parse_options(const nlohmann::json& item, const std::string& where, McqInstance& out) {
    if (!item.contains("options") || !item.at("options").is_object()) {
        throw ParseError(where + ": missing 'options' object");
    }
    const auto& options = item.at("options");
    if (options.size() < 2 || options.size() > 5) {
        throw ParseError(where + ": expected 2 to 5 options, got " +
                         std::to_string(options.size()));
    }
    for (const auto& [key, value] : options.items()) {
        if (key.size() != 1 || key[0] < 'A' || key[0] > 'E') {
            throw ParseError(where + ": option key '" + key + "' is not a letter A-E");
        }
        if (!value.is_string() || value.get<std::string>().empty()) {
            throw ParseError(where + ": option '" + key + "' must be a non-empty string");
        }
        out.options[key[0]] = value.get<std::string>();
    }
    for (std::size_t i = 0; i < out.options.size(); ++i) {
        if (!out.options.count(static_cast<char>('A' + i))) {
            throw ParseError(where + ": options must be lettered contiguously from 'A'");
        }
    }

    const std::string answer = require_string(item, "answer", where);
    if (answer.size() != 1 || !out.options.count(answer[0])) {
        throw ParseError(where + ": 'answer' must name one of the options");
    }
    out.gold = answer[0];
}

std::string compose_question(const std::string& stem, const std::map<char, std::string>& options) {
    std::string text = stem;
    for (const auto& [letter, option] : options) {
        text += "\n";
        text += letter;
        text += ": ";
        text += option;
    }
    return text;
}

std::string tier_for(const std::map<Lang, std::string>& tier_map, Lang lang) {
    const auto it = tier_map.find(lang);
    return it == tier_map.end() ? std::string{} : it->second;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

} // namespace

std::optional<char> extract_answer(const std::string& raw) {
    const std::vector<std::string> lines = split_lines(raw);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        const auto found = scan_line(*it);
        if (found.has_value()) {
            return found;
        }
    }
    return std::nullopt;
}

const std::map<Lang, std::string>& default_tier_map() {
    static const std::map<Lang, std::string> kMap = {
        {Lang::su, "low"},  {Lang::as, "low"},  {Lang::az, "low"},  {Lang::ha, "low"},
        {Lang::am, "low"},  {Lang::fa, "mid"},  {Lang::id, "mid"},  {Lang::el, "mid"},
        {Lang::ko, "mid"},  {Lang::es, "high"}, {Lang::en, "high"}, {Lang::zh, "high"},
        {Lang::ar, "high"},
    };
    return kMap;
}

std::vector<McqInstance> load_blend(const std::filesystem::path& path,
                                    const std::map<Lang, std::string>& tier_map) {
    const nlohmann::json doc = load_array(path);
    std::vector<McqInstance> out;
    out.reserve(doc.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const nlohmann::json& item = doc[i];
        const std::string where = path.string() + ": instance " + std::to_string(i);
        if (!item.is_object()) {
            throw ParseError(where + ": not a JSON object");
        }
        McqInstance inst;
        inst.dataset = "blend";
        inst.uid = require_string(item, "id", where);
        if (!seen.insert(inst.uid).second) {
            throw ParseError(where + ": duplicate id '" + inst.uid + "'");
        }
        const std::string code = require_string(item, "language", inst.uid);
        const auto lang = parse_lang(code);
        if (!lang.has_value()) {
            throw ParseError(inst.uid + ": unknown language '" + code + "'");
        }
        inst.source_lang = *lang;
        inst.group = require_string(item, "country", inst.uid);
        const std::string stem = require_string(item, "question", inst.uid);
        parse_options(item, inst.uid, inst);
        inst.question = compose_question(stem, inst.options);
        inst.tier = tier_for(tier_map, inst.source_lang);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<McqInstance> load_click(const std::filesystem::path& path,
                                    const std::map<Lang, std::string>& tier_map) {
    const nlohmann::json doc = load_array(path);
    std::vector<McqInstance> out;
    out.reserve(doc.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const nlohmann::json& item = doc[i];
        const std::string where = path.string() + ": instance " + std::to_string(i);
        if (!item.is_object()) {
            throw ParseError(where + ": not a JSON object");
        }
        McqInstance inst;
        inst.dataset = "click";
        inst.uid = require_string(item, "id", where);
        if (!seen.insert(inst.uid).second) {
            throw ParseError(where + ": duplicate id '" + inst.uid + "'");
        }
        inst.source_lang = Lang::ko;
        inst.group = require_string(item, "category", inst.uid);
        const std::string stem = require_string(item, "question", inst.uid);
        parse_options(item, inst.uid, inst);
        inst.question = compose_question(stem, inst.options);
        inst.tier = tier_for(tier_map, inst.source_lang);
        out.push_back(std::move(inst));
    }
    return out;
}

EvalReport score_batch(const std::vector<McqInstance>& instances,
                       const std::vector<RunResult>& results) {
    if (instances.size() != results.size()) {
        throw Error("score_batch: " + std::to_string(instances.size()) + " instances vs " +
                    std::to_string(results.size()) + " results");
    }
    EvalReport report;
    if (!instances.empty()) {
        report.dataset = instances.front().dataset;
    }
    if (!results.empty()) {
        report.method = results.front().method;
    }

    std::map<std::string, std::string> lang_tier;
    long long iterations_sum = 0;
    long long evidence_iteration_sum = 0;
    long long evidence_items = 0;
    double prompt_sum = 0.0;
    double completion_sum = 0.0;

    for (std::size_t i = 0; i < instances.size(); ++i) {
        const McqInstance& inst = instances[i];
        const RunResult& run = results[i];
        if (!run.uid.empty() && run.uid != inst.uid) {
            throw Error("score_batch: result " + std::to_string(i) + " is for '" + run.uid +
                        "' but instance is '" + inst.uid + "'");
        }

        const bool correct = run.answer.has_value() && *run.answer == inst.gold;
        const std::string code{lang_code(inst.source_lang)};
        report.total += 1;
        report.correct += correct ? 1 : 0;
        report.per_lang[code].total += 1;
        report.per_lang[code].correct += correct ? 1 : 0;
        report.per_group[inst.group].total += 1;
        report.per_group[inst.group].correct += correct ? 1 : 0;
        lang_tier[code] = inst.tier;

        iterations_sum += run.iterations_run;
        prompt_sum += static_cast<double>(run.prompt_tokens);
        completion_sum += static_cast<double>(run.completion_tokens);
        for (const EvidenceItem& item : run.evidence_used) {
            evidence_iteration_sum += item.found_iteration;
            evidence_items += 1;
            report.evidence_lang_counts[std::string(lang_code(item.lang))] += 1;
        }
        for (const IterationRecord& rec : run.trace) {
            if (rec.no_progress) {
                continue;
            }
            for (Lang lang : rec.plan.language_names) {
                report.planner_lang_counts[std::string(lang_code(lang))] += 1;
            }
        }
    }

    const auto ratio = [](int num, int den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / den;
    };
    report.overall_accuracy = ratio(report.correct, report.total);
    for (auto& [code, stats] : report.per_lang) {
        stats.accuracy = ratio(stats.correct, stats.total);
    }
    for (auto& [group, stats] : report.per_group) {
        stats.accuracy = ratio(stats.correct, stats.total);
    }

    // Tier averages weight each member language equally.
    std::map<std::string, std::pair<double, int>> tier_acc;
    for (const auto& [code, stats] : report.per_lang) {
        const std::string& tier = lang_tier[code];
        if (tier.empty()) {
            continue;
        }
        tier_acc[tier].first += stats.accuracy;
        tier_acc[tier].second += 1;
    }
    for (const auto& [tier, acc] : tier_acc) {
        report.tier_accuracy[tier] = acc.first / acc.second;
    }

    if (!results.empty()) {
        report.mean_iterations = static_cast<double>(iterations_sum) / results.size();
        report.mean_prompt_tokens = prompt_sum / results.size();
        report.mean_completion_tokens = completion_sum / results.size();
    }
    if (evidence_items > 0) {
        report.mean_final_evidence_iteration =
            static_cast<double>(evidence_iteration_sum) / evidence_items;
    }
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["dataset"] = report.dataset;
    j["total"] = report.total;
    j["correct"] = report.correct;
    j["overall_accuracy"] = report.overall_accuracy;
    const auto stats_obj = [](const GroupStats& stats) {
        return nlohmann::json{
            {"total", stats.total}, {"correct", stats.correct}, {"accuracy", stats.accuracy}};
    };
    j["per_lang"] = nlohmann::json::object();
    for (const auto& [code, stats] : report.per_lang) {
        j["per_lang"][code] = stats_obj(stats);
    }
    j["per_group"] = nlohmann::json::object();
    for (const auto& [group, stats] : report.per_group) {
        j["per_group"][group] = stats_obj(stats);
    }
    j["tier_accuracy"] = report.tier_accuracy;
    j["mean_iterations"] = report.mean_iterations;
    j["mean_final_evidence_iteration"] = report.mean_final_evidence_iteration;
    j["mean_prompt_tokens"] = report.mean_prompt_tokens;
    j["mean_completion_tokens"] = report.mean_completion_tokens;
    j["planner_lang_counts"] = report.planner_lang_counts;
    j["evidence_lang_counts"] = report.evidence_lang_counts;
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.method = j.at("method").get<std::string>();
    report.dataset = j.at("dataset").get<std::string>();
    report.total = j.at("total").get<int>();
    report.correct = j.at("correct").get<int>();
    report.overall_accuracy = j.at("overall_accuracy").get<double>();
    for (const auto& [code, stats] : j.at("per_lang").items()) {
        report.per_lang[code] = {stats.at("total").get<int>(), stats.at("correct").get<int>(),
                                 stats.at("accuracy").get<double>()};
    }
    for (const auto& [group, stats] : j.at("per_group").items()) {
        report.per_group[group] = {stats.at("total").get<int>(), stats.at("correct").get<int>(),
                                   stats.at("accuracy").get<double>()};
    }
    report.tier_accuracy = j.at("tier_accuracy").get<std::map<std::string, double>>();
    report.mean_iterations = j.at("mean_iterations").get<double>();
    report.mean_final_evidence_iteration = j.at("mean_final_evidence_iteration").get<double>();
    report.mean_prompt_tokens = j.at("mean_prompt_tokens").get<double>();
    report.mean_completion_tokens = j.at("mean_completion_tokens").get<double>();
    report.planner_lang_counts = j.at("planner_lang_counts").get<std::map<std::string, int>>();
    report.evidence_lang_counts = j.at("evidence_lang_counts").get<std::map<std::string, int>>();
    return report;
}

std::string render_report_table(const std::vector<EvalReport>& reports) {
    std::vector<std::string> row_labels = {"overall accuracy", "instances"};
    std::set<std::string> lang_codes;
    std::set<std::string> tiers;
    for (const EvalReport& report : reports) {
        for (const auto& [code, stats] : report.per_lang) {
            lang_codes.insert(code);
        }
        for (const auto& [tier, acc] : report.tier_accuracy) {
            tiers.insert(tier);
        }
    }
    for (const std::string& code : lang_codes) {
        row_labels.push_back("acc[" + code + "]");
    }
    for (const std::string& tier : tiers) {
        row_labels.push_back("tier[" + tier + "]");
    }
    row_labels.push_back("mean iterations");
    row_labels.push_back("mean evidence iter");
    row_labels.push_back("mean prompt tokens");
    row_labels.push_back("mean completion tokens");

    const auto cell = [&](const EvalReport& report, const std::string& label) -> std::string {
        if (label == "overall accuracy") {
            return format_fixed(report.overall_accuracy * 100.0, 1);
        }
        if (label == "instances") {
            return std::to_string(report.total);
        }
        if (label.rfind("acc[", 0) == 0) {
            const std::string code = label.substr(4, label.size() - 5);
            const auto it = report.per_lang.find(code);
            return it == report.per_lang.end() ? "-" : format_fixed(it->second.accuracy * 100.0, 1);
        }
        if (label.rfind("tier[", 0) == 0) {
            const std::string tier = label.substr(5, label.size() - 6);
            const auto it = report.tier_accuracy.find(tier);
            return it == report.tier_accuracy.end() ? "-"
                                                    : format_fixed(it->second * 100.0, 1);
        }
        if (label == "mean iterations") {
            return format_fixed(report.mean_iterations, 2);
        }
        if (label == "mean evidence iter") {
            return format_fixed(report.mean_final_evidence_iteration, 2);
        }
        if (label == "mean prompt tokens") {
            return format_fixed(report.mean_prompt_tokens, 1);
        }
        return format_fixed(report.mean_completion_tokens, 1);
    };

    // Column widths: label column, then one column per report.
    std::size_t label_width = 6;
    for (const std::string& label : row_labels) {
        label_width = std::max(label_width, label.size());
    }
    std::vector<std::string> headers;
    std::vector<std::size_t> widths;
    for (const EvalReport& report : reports) {
        std::string header = report.method.empty() ? "?" : report.method;
        if (!report.dataset.empty()) {
            header += "/" + report.dataset;
        }
        std::size_t width = header.size();
        for (const std::string& label : row_labels) {
            width = std::max(width, cell(report, label).size());
        }
        headers.push_back(header);
        widths.push_back(width);
    }

    std::string out = std::string(label_width, ' ');
    for (std::size_t c = 0; c < headers.size(); ++c) {
        out += "  " + std::string(widths[c] - headers[c].size(), ' ') + headers[c];
    }
    out += "\n";
    for (const std::string& label : row_labels) {
        out += label + std::string(label_width - label.size(), ' ');
        for (std::size_t c = 0; c < reports.size(); ++c) {
            const std::string value = cell(reports[c], label);
            out += "  " + std::string(widths[c] - value.size(), ' ') + value;
        }
        out += "\n";
    }
    return out;
}

} // namespace coral
