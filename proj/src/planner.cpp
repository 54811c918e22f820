#include "coral/planner.hpp"

#include <algorithm>

#include "coral/errors.hpp"
#include "coral/prompts.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

bool plan_reply_shape(const nlohmann::json& j) {
    return j.is_object() && j.contains("language_names") && j.at("language_names").is_array();
}

bool same_lang_set(const std::vector<Lang>& a, const std::vector<Lang>& b) {
    std::vector<Lang> sa = a;
    std::vector<Lang> sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    return sa == sb;
}

// Violated-rule text quoted back verbatim from the replanning instructions.
constexpr const char* kMustChangeReprompt =
    "Your revision violated this rule:\n"
    "\"You MUST NOT simply repeat the previous decision.\n"
    "At least one of the following must change:\n"
    "\n"
    "   - the set of language codes (`language_names`), OR\n"
    "   - the rewritten query (focus, structure, or keywords).\"\n"
    "\n"
    "Produce a revised decision that changes at least one of them. Return only the JSON object.";

} // namespace

SanitizedPlan sanitize_plan(const nlohmann::json& raw) {
    if (!plan_reply_shape(raw)) {
        throw ParseError("planner reply is missing the 'language_names' array");
    }

    SanitizedPlan out;
    bool seen[kLangCount] = {};
    for (const nlohmann::json& entry : raw.at("language_names")) {
        if (!entry.is_string()) {
            out.dropped_codes = true;
            continue;
        }
        const auto lang = parse_lang(to_lower_ascii(entry.get<std::string>()));
        if (!lang.has_value()) {
            out.dropped_codes = true;
            continue;
        }
        const auto idx = static_cast<std::size_t>(*lang);
        if (seen[idx]) {
            continue;
        }
        seen[idx] = true;
        out.langs.push_back(*lang);
    }
    if (out.langs.size() > 3) {
        out.langs.resize(3);
    }
    if (out.langs.empty()) {
        out.langs.push_back(Lang::en);
        out.empty_fallback = true;
    }

    if (raw.contains("rewritten_query") && raw.at("rewritten_query").is_string()) {
        std::string q = raw.at("rewritten_query").get<std::string>();
        if (!q.empty()) {
            out.rewritten_query = std::move(q);
        }
    }
    return out;
}

PlannerEngine::PlannerEngine(AgentGateway& gateway) : gateway_(gateway) {}

PlanOutcome PlannerEngine::plan_initial(const std::string& query) {
    PlanOutcome outcome;
    outcome.plan.iteration = 1;

    const auto messages = render_prompt(PromptId::planner_initial, {{"USER_QUERY", query}});
    const auto reply = gateway_.complete_json(AgentRole::planner, messages, plan_reply_shape);
    if (!reply.has_value()) {
        outcome.plan.language_names = {Lang::en};
        outcome.flags.push_back("planner_unparsable_fallback_en");
        return outcome;
    }

    const SanitizedPlan sanitized = sanitize_plan(*reply);
    outcome.plan.language_names = sanitized.langs;
    // The first pass never rewrites: retrieval starts from the user's words.
    outcome.plan.rewritten_query.reset();
    if (sanitized.dropped_codes) {
        outcome.flags.push_back("planner_dropped_invalid_langs");
    }
    if (sanitized.empty_fallback) {
        outcome.flags.push_back("planner_empty_langs_fallback_en");
    }
    return outcome;
}

PlanOutcome PlannerEngine::plan_revise(const PlannerFeedback& feedback, int next_iteration,
                                       bool enable_query_rewrite, bool enable_dynamic_corpora,
                                       const std::vector<Lang>& fixed_langs) {
    PlanOutcome outcome;
    outcome.plan.iteration = next_iteration;

    const std::vector<Lang> pinned_langs =
        enable_dynamic_corpora ? std::vector<Lang>{} : fixed_langs;
    const auto fallback_plan = [&]() -> RetrievalPlan {
        RetrievalPlan plan;
        plan.iteration = next_iteration;
        plan.language_names = enable_dynamic_corpora ? feedback.previous_langs : pinned_langs;
        return plan;
    };

    auto messages =
        render_prompt(PromptId::planner_revise,
                      {{"USER_QUERY", feedback.original_query},
                       {"REWRITTEN_QUERY", feedback.previous_retrieval_query},
                       {"PREV_LANGS", format_lang_list(feedback.previous_langs)},
                       {"REASON", feedback.reason}});

    // Applies the ablation switches, then checks the must-change rule against
    // the previous iteration.
    const auto evaluate = [&](const SanitizedPlan& sanitized, bool& changed) {
        RetrievalPlan plan;
        plan.iteration = next_iteration;
        plan.language_names = enable_dynamic_corpora ? sanitized.langs : pinned_langs;
        plan.rewritten_query =
            enable_query_rewrite ? sanitized.rewritten_query : std::nullopt;
        const std::string effective_query =
            plan.rewritten_query.value_or(feedback.previous_retrieval_query);
        changed = !same_lang_set(plan.language_names, feedback.previous_langs) ||
                  effective_query != feedback.previous_retrieval_query;
        return plan;
    };

    std::string raw_text;
    auto reply = gateway_.complete_json(AgentRole::planner, messages, plan_reply_shape, &raw_text);
    if (!reply.has_value()) {
        outcome.plan = fallback_plan();
        outcome.no_progress = true;
        outcome.flags.push_back("planner_revise_unparsable_no_progress");
        return outcome;
    }

    SanitizedPlan sanitized = sanitize_plan(*reply);
    if (sanitized.dropped_codes) {
        outcome.flags.push_back("planner_dropped_invalid_langs");
    }
    if (sanitized.empty_fallback) {
        outcome.flags.push_back("planner_empty_langs_fallback_en");
    }

    bool changed = false;
    outcome.plan = evaluate(sanitized, changed);
    if (changed) {
        return outcome;
    }

    // One corrective round: replay the exchange and quote the rule.
    messages.push_back({"assistant", raw_text});
    messages.push_back({"user", kMustChangeReprompt});
    outcome.flags.push_back("planner_must_change_reprompt");

    reply = gateway_.complete_json(AgentRole::planner, messages, plan_reply_shape);
    if (!reply.has_value()) {
        outcome.plan = fallback_plan();
        outcome.no_progress = true;
        outcome.flags.push_back("planner_revise_unparsable_no_progress");
        return outcome;
    }

    sanitized = sanitize_plan(*reply);
    if (sanitized.dropped_codes) {
        outcome.flags.push_back("planner_dropped_invalid_langs");
    }
    if (sanitized.empty_fallback) {
        outcome.flags.push_back("planner_empty_langs_fallback_en");
    }

    outcome.plan = evaluate(sanitized, changed);
    if (!changed) {
        outcome.plan = fallback_plan();
        outcome.no_progress = true;
        outcome.flags.push_back("planner_no_progress");
    }
    return outcome;
}

} // namespace coral
