#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coral/gateway.hpp"
#include "coral/lang.hpp"

namespace coral {

struct RetrievalPlan {
    std::vector<Lang> language_names; // 1..3, deduplicated, pool members only
    std::optional<std::string> rewritten_query;
    int iteration = 1;

    bool operator==(const RetrievalPlan&) const = default;
};

// What the replanner is told about the iteration that fell short.
struct PlannerFeedback {
    std::string original_query;
    std::string previous_retrieval_query;
    std::vector<Lang> previous_langs;
    std::string reason;
};

struct SanitizedPlan {
    std::vector<Lang> langs;
    std::optional<std::string> rewritten_query;
    bool dropped_codes = false;  // unknown / non-pool entries removed
    bool empty_fallback = false; // nothing survived; fell back to ["en"]
};

// Normalizes a raw planner reply: codes are lowercased, non-pool codes
// dropped, duplicates removed (first occurrence wins), list truncated to 3;
// an empty survivor list falls back to ["en"]. "rewritten_query" is kept only
// when it is a non-empty string. Throws ParseError when "language_names" is
// missing or not an array.
SanitizedPlan sanitize_plan(const nlohmann::json& raw);

struct PlanOutcome {
    RetrievalPlan plan;
    bool no_progress = false; // revision could not change anything
    std::vector<std::string> flags;
};

class PlannerEngine {
  public:
    explicit PlannerEngine(AgentGateway& gateway);

    // Iteration-1 corpus selection. Parse exhaustion degrades to ["en"] with
    // a flag; the initial plan never carries a rewritten query.
    PlanOutcome plan_initial(const std::string& query);

    // Replanning for iteration `next_iteration`. The revision must change the
    // language set or the retrieval query; a no-op revision gets exactly one
    // corrective re-prompt quoting the violated rule, and a second no-op (or
    // parse exhaustion) reports no_progress. With query rewriting disabled
    // the rewritten query is discarded and the rule is judged on the language
    // set alone; with dynamic corpora disabled the language set is pinned to
    // `fixed_langs` and the rule is judged on the query alone.
    PlanOutcome plan_revise(const PlannerFeedback& feedback, int next_iteration,
                            bool enable_query_rewrite = true, bool enable_dynamic_corpora = true,
                            const std::vector<Lang>& fixed_langs = {});

  private:
    AgentGateway& gateway_;
};

} // namespace coral
