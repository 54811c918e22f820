#include "coral/trace.hpp"

#include "coral/errors.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ParseError("trace field '" + key + "': " + what);
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        fail(key, "missing");
    }
    return j.at(key);
}

std::string get_string(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = field(j, key);
    if (!v.is_string()) {
        fail(key, "expected a string");
    }
    return v.get<std::string>();
}

bool get_bool(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = field(j, key);
    if (!v.is_boolean()) {
        fail(key, "expected a boolean");
    }
    return v.get<bool>();
}

long long get_int(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = field(j, key);
    if (!v.is_number_integer()) {
        fail(key, "expected an integer");
    }
    return v.get<long long>();
}

double get_double(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = field(j, key);
    if (!v.is_number()) {
        fail(key, "expected a number");
    }
    return v.get<double>();
}

Lang get_lang(const nlohmann::json& j, const char* key) {
    const auto lang = parse_lang(get_string(j, key));
    if (!lang.has_value()) {
        fail(key, "unknown language code");
    }
    return *lang;
}

std::vector<std::string> get_string_list(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = field(j, key);
    if (!v.is_array()) {
        fail(key, "expected an array");
    }
    std::vector<std::string> out;
    for (const auto& entry : v) {
        if (!entry.is_string()) {
            fail(key, "expected strings");
        }
        out.push_back(entry.get<std::string>());
    }
    return out;
}

std::vector<Lang> get_lang_list(const nlohmann::json& j, const char* key) {
    std::vector<Lang> out;
    for (const std::string& code : get_string_list(j, key)) {
        const auto lang = parse_lang(code);
        if (!lang.has_value()) {
            fail(key, "unknown language code '" + code + "'");
        }
        out.push_back(*lang);
    }
    return out;
}

nlohmann::json lang_list_json(const std::vector<Lang>& langs) {
    nlohmann::json out = nlohmann::json::array();
    for (Lang lang : langs) {
        out.push_back(std::string(lang_code(lang)));
    }
    return out;
}

nlohmann::json scores_to_json(const CriterionScores& s) {
    return {{"relevance", s.relevance},
            {"usefulness", s.usefulness},
            {"clarity_specificity", s.clarity_specificity},
            {"compatibility", s.compatibility}};
}

CriterionScores scores_from_json(const nlohmann::json& j) {
    CriterionScores s;
    s.relevance = static_cast<int>(get_int(j, "relevance"));
    s.usefulness = static_cast<int>(get_int(j, "usefulness"));
    s.clarity_specificity = static_cast<int>(get_int(j, "clarity_specificity"));
    s.compatibility = static_cast<int>(get_int(j, "compatibility"));
    return s;
}

nlohmann::json hit_to_json(const ScoredHit& hit) {
    return {{"chunk_id", hit.chunk_id},
            {"lang", std::string(lang_code(hit.lang))},
            {"score", hit.score},
            {"rank", hit.rank}};
}

ScoredHit hit_from_json(const nlohmann::json& j) {
    ScoredHit hit;
    hit.chunk_id = get_string(j, "chunk_id");
    hit.lang = get_lang(j, "lang");
    hit.score = get_double(j, "score");
    hit.rank = static_cast<int>(get_int(j, "rank"));
    return hit;
}

nlohmann::json critique_to_json(const Critique& c) {
    return {{"scores", scores_to_json(c.scores)},
            {"text", c.text},
            {"chunk_id", c.chunk_id},
            {"doc_text", c.doc_text},
            {"query_used", c.query_used},
            {"lang", std::string(lang_code(c.lang))},
            {"retrieval_rank", c.retrieval_rank},
            {"clamped", c.clamped},
            {"unparsable", c.unparsable}};
}

Critique critique_from_json(const nlohmann::json& j) {
    Critique c;
    c.scores = scores_from_json(field(j, "scores"));
    c.text = get_string(j, "text");
    c.chunk_id = get_string(j, "chunk_id");
    c.doc_text = get_string(j, "doc_text");
    c.query_used = get_string(j, "query_used");
    c.lang = get_lang(j, "lang");
    c.retrieval_rank = static_cast<int>(get_int(j, "retrieval_rank"));
    c.clamped = get_bool(j, "clamped");
    c.unparsable = get_bool(j, "unparsable");
    return c;
}

nlohmann::json evidence_to_json(const EvidenceItem& e) {
    return {{"chunk_id", e.chunk_id},
            {"lang", std::string(lang_code(e.lang))},
            {"text", e.text},
            {"scores", scores_to_json(e.scores)},
            {"s_tot_x2", e.s_tot_x2},
            {"critique", e.critique},
            {"found_iteration", e.found_iteration},
            {"retrieval_rank", e.retrieval_rank}};
}

EvidenceItem evidence_from_json(const nlohmann::json& j) {
    EvidenceItem e;
    e.chunk_id = get_string(j, "chunk_id");
    e.lang = get_lang(j, "lang");
    e.text = get_string(j, "text");
    e.scores = scores_from_json(field(j, "scores"));
    e.s_tot_x2 = static_cast<int>(get_int(j, "s_tot_x2"));
    e.critique = get_string(j, "critique");
    e.found_iteration = static_cast<int>(get_int(j, "found_iteration"));
    e.retrieval_rank = static_cast<int>(get_int(j, "retrieval_rank"));
    return e;
}

nlohmann::json plan_to_json(const RetrievalPlan& plan) {
    nlohmann::json j = {{"language_names", lang_list_json(plan.language_names)},
                        {"iteration", plan.iteration}};
    j["rewritten_query"] =
        plan.rewritten_query.has_value() ? nlohmann::json(*plan.rewritten_query) : nullptr;
    return j;
}

RetrievalPlan plan_from_json(const nlohmann::json& j) {
    RetrievalPlan plan;
    plan.language_names = get_lang_list(j, "language_names");
    plan.iteration = static_cast<int>(get_int(j, "iteration"));
    const nlohmann::json& rewritten = field(j, "rewritten_query");
    if (rewritten.is_string()) {
        plan.rewritten_query = rewritten.get<std::string>();
    } else if (!rewritten.is_null()) {
        fail("rewritten_query", "expected a string or null");
    }
    return plan;
}

nlohmann::json record_to_json(const IterationRecord& r) {
    nlohmann::json hits = nlohmann::json::array();
    for (const auto& [lang, lang_hits] : r.hits) {
        nlohmann::json rows = nlohmann::json::array();
        for (const ScoredHit& hit : lang_hits) {
            rows.push_back(hit_to_json(hit));
        }
        hits.push_back({{"lang", std::string(lang_code(lang))}, {"hits", rows}});
    }
    nlohmann::json critiques = nlohmann::json::array();
    for (const Critique& c : r.critiques) {
        critiques.push_back(critique_to_json(c));
    }
    return {{"iteration", r.iteration},
            {"plan", plan_to_json(r.plan)},
            {"retrieval_query", r.retrieval_query},
            {"hits", hits},
            {"critiques", critiques},
            {"pool_size_after", r.pool_size_after},
            {"decision", {{"enough", r.decision.enough}, {"reason", r.decision.reason}}},
            {"no_progress", r.no_progress},
            {"flags", r.flags}};
}

IterationRecord record_from_json(const nlohmann::json& j) {
    IterationRecord r;
    r.iteration = static_cast<int>(get_int(j, "iteration"));
    r.plan = plan_from_json(field(j, "plan"));
    r.retrieval_query = get_string(j, "retrieval_query");
    const nlohmann::json& hits = field(j, "hits");
    if (!hits.is_array()) {
        fail("hits", "expected an array");
    }
    for (const auto& group : hits) {
        std::vector<ScoredHit> rows;
        for (const auto& hit : field(group, "hits")) {
            rows.push_back(hit_from_json(hit));
        }
        r.hits.emplace_back(get_lang(group, "lang"), std::move(rows));
    }
    const nlohmann::json& critiques = field(j, "critiques");
    if (!critiques.is_array()) {
        fail("critiques", "expected an array");
    }
    for (const auto& c : critiques) {
        r.critiques.push_back(critique_from_json(c));
    }
    r.pool_size_after = static_cast<std::size_t>(get_int(j, "pool_size_after"));
    const nlohmann::json& decision = field(j, "decision");
    r.decision.enough = get_bool(decision, "enough");
    r.decision.reason = get_string(decision, "reason");
    r.no_progress = get_bool(j, "no_progress");
    r.flags = get_string_list(j, "flags");
    return r;
}

} // namespace

nlohmann::json run_to_json(const RunResult& run) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const EvidenceItem& e : run.evidence_used) {
        evidence.push_back(evidence_to_json(e));
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const IterationRecord& r : run.trace) {
        trace.push_back(record_to_json(r));
    }
    nlohmann::json hits = nlohmann::json::array();
    for (const ScoredHit& hit : run.retrieval_hits) {
        hits.push_back(hit_to_json(hit));
    }
    nlohmann::json j = {{"method", run.method},
                        {"query", run.query},
                        {"answer_text", run.answer_text},
                        {"evidence_used", evidence},
                        {"trace", trace},
                        {"scope", lang_list_json(run.scope)},
                        {"retrieval_query", run.retrieval_query},
                        {"retrieval_hits", hits},
                        {"iterations_run", run.iterations_run},
                        {"prompt_tokens", run.prompt_tokens},
                        {"completion_tokens", run.completion_tokens},
                        {"flags", run.flags},
                        {"uid", run.uid}};
    j["answer"] = run.answer.has_value() ? nlohmann::json(std::string(1, *run.answer)) : nullptr;
    return j;
}

RunResult run_from_json(const nlohmann::json& j) {
    RunResult run;
    run.method = get_string(j, "method");
    run.query = get_string(j, "query");
    const nlohmann::json& answer = field(j, "answer");
    if (answer.is_string()) {
        const std::string text = answer.get<std::string>();
        if (text.size() != 1) {
            fail("answer", "expected a single letter");
        }
        run.answer = text[0];
    } else if (!answer.is_null()) {
        fail("answer", "expected a string or null");
    }
    run.answer_text = get_string(j, "answer_text");
    const nlohmann::json& evidence = field(j, "evidence_used");
    if (!evidence.is_array()) {
        fail("evidence_used", "expected an array");
    }
    for (const auto& e : evidence) {
        run.evidence_used.push_back(evidence_from_json(e));
    }
    const nlohmann::json& trace = field(j, "trace");
    if (!trace.is_array()) {
        fail("trace", "expected an array");
    }
    for (const auto& r : trace) {
        run.trace.push_back(record_from_json(r));
    }
    run.scope = get_lang_list(j, "scope");
    run.retrieval_query = get_string(j, "retrieval_query");
    const nlohmann::json& hits = field(j, "retrieval_hits");
    if (!hits.is_array()) {
        fail("retrieval_hits", "expected an array");
    }
    for (const auto& hit : hits) {
        run.retrieval_hits.push_back(hit_from_json(hit));
    }
    run.iterations_run = static_cast<int>(get_int(j, "iterations_run"));
    run.prompt_tokens = get_int(j, "prompt_tokens");
    run.completion_tokens = get_int(j, "completion_tokens");
    run.flags = get_string_list(j, "flags");
    run.uid = get_string(j, "uid");
    return run;
}

void write_trace(const std::filesystem::path& path, const RunResult& run,
                 const nlohmann::json& config_header) {
    const nlohmann::json j = {{"config", config_header}, {"run", run_to_json(run)}};
    write_file_bytes(path, j.dump(2) + "\n");
}

TraceFile read_trace(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    TraceFile out;
    out.config = field(j, "config");
    out.run = run_from_json(field(j, "run"));
    return out;
}

} // namespace coral
