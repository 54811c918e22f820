#include "coral/critic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "coral/errors.hpp"
#include "coral/prompts.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

void add_flag(std::vector<std::string>* flags, std::string flag) {
    if (flags != nullptr) {
        flags->push_back(std::move(flag));
    }
}

// Missing / non-numeric values degrade to 0; fractional values round to the
// nearest integer; everything lands in [0, 5]. Any adjustment is reported so
// the run record shows the reply deviated from the contract.
int read_criterion(const nlohmann::json& scores, const char* name, bool& adjusted) {
    if (!scores.contains(name) || !scores.at(name).is_number()) {
        adjusted = true;
        return 0;
    }
    const double raw = scores.at(name).get<double>();
    const long long rounded = std::llround(raw);
    if (static_cast<double>(rounded) != raw) {
        adjusted = true;
    }
    long long value = rounded;
    if (value < 0) {
        value = 0;
        adjusted = true;
    } else if (value > 5) {
        value = 5;
        adjusted = true;
    }
    return static_cast<int>(value);
}

} // namespace

int total_score_x2(const CriterionScores& scores, const ScoreWeightsX2& weights) {
    return weights.relevance * scores.relevance + weights.usefulness * scores.usefulness +
           weights.clarity_specificity * scores.clarity_specificity +
           weights.compatibility * scores.compatibility;
}

bool is_valid(const CriterionScores& scores, const ScoreWeightsX2& weights,
              const ValidityThresholds& thresholds) {
    const int floor = thresholds.per_criterion_min;
    if (scores.relevance < floor || scores.usefulness < floor ||
        scores.clarity_specificity < floor || scores.compatibility < floor) {
        return false;
    }
    return total_score_x2(scores, weights) >= thresholds.total_min_x2;
}

void sort_pool(std::vector<EvidenceItem>& pool) {
    std::sort(pool.begin(), pool.end(), [](const EvidenceItem& a, const EvidenceItem& b) {
        if (a.s_tot_x2 != b.s_tot_x2) {
            return a.s_tot_x2 > b.s_tot_x2;
        }
        if (a.scores.relevance != b.scores.relevance) {
            return a.scores.relevance > b.scores.relevance;
        }
        if (a.found_iteration != b.found_iteration) {
            return a.found_iteration < b.found_iteration;
        }
        return a.chunk_id < b.chunk_id;
    });
}

std::string serialize_pool(const std::vector<EvidenceItem>& pool) {
    if (pool.empty()) {
        return "No documents were retrieved.";
    }
    std::string out;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const EvidenceItem& item = pool[i];
        if (i > 0) {
            out += "\n\n";
        }
        out += "[" + std::to_string(i + 1) + "] content: " + item.text;
        out += "\nscores: relevance=" + std::to_string(item.scores.relevance);
        out += ", usefulness=" + std::to_string(item.scores.usefulness);
        out += ", clarity_specificity=" + std::to_string(item.scores.clarity_specificity);
        out += ", compatibility=" + std::to_string(item.scores.compatibility);
        out += ", s_tot=" + format_half_points(item.s_tot_x2);
        out += "\ncritique: " + item.critique;
    }
    return out;
}

CriticEngine::CriticEngine(AgentGateway& gateway, ScoreWeightsX2 weights,
                           ValidityThresholds thresholds)
    : gateway_(gateway), weights_(weights), thresholds_(thresholds) {}

Critique CriticEngine::score_document(const std::string& query, const Chunk& chunk,
                                      int retrieval_rank, std::vector<std::string>* flags) {
    Critique result;
    result.chunk_id = chunk.chunk_id;
    result.doc_text = chunk.text;
    result.query_used = query;
    result.lang = chunk.lang;
    result.retrieval_rank = retrieval_rank;

    const auto messages =
        render_prompt(PromptId::critic_score, {{"QUERY", query}, {"DOCUMENTS", chunk.text}});
    const auto reply = gateway_.complete_json(
        AgentRole::critic, messages,
        [](const nlohmann::json& j) { return j.is_object() && j.contains("scores") && j.at("scores").is_object(); });

    if (!reply.has_value()) {
        result.scores = CriterionScores{};
        result.text = "unparsable";
        result.unparsable = true;
        add_flag(flags, "critic_unparsable:" + chunk.chunk_id);
        return result;
    }

    const nlohmann::json& scores = reply->at("scores");
    bool adjusted = false;
    result.scores.relevance = read_criterion(scores, "relevance", adjusted);
    result.scores.usefulness = read_criterion(scores, "usefulness", adjusted);
    result.scores.clarity_specificity = read_criterion(scores, "clarity_specificity", adjusted);
    result.scores.compatibility = read_criterion(scores, "compatibility", adjusted);
    result.clamped = adjusted;
    if (adjusted) {
        add_flag(flags, "critic_scores_clamped:" + chunk.chunk_id);
    }

    if (reply->contains("critique") && reply->at("critique").is_string()) {
        result.text = reply->at("critique").get<std::string>();
    }
    if (result.text.empty()) {
        add_flag(flags, "critic_empty_critique:" + chunk.chunk_id);
    }
    return result;
}

void CriticEngine::pool_evidence(std::vector<EvidenceItem>& pool,
                                 const std::vector<Critique>& batch, int iteration) const {
    for (const Critique& critique : batch) {
        if (critique.unparsable || !is_valid(critique.scores, weights_, thresholds_)) {
            continue;
        }
        EvidenceItem item;
        item.chunk_id = critique.chunk_id;
        item.lang = critique.lang;
        item.text = critique.doc_text;
        item.scores = critique.scores;
        item.s_tot_x2 = total_score_x2(critique.scores, weights_);
        item.critique = critique.text;
        item.found_iteration = iteration;
        item.retrieval_rank = critique.retrieval_rank;

        auto existing = std::find_if(pool.begin(), pool.end(), [&](const EvidenceItem& e) {
            return e.chunk_id == item.chunk_id;
        });
        if (existing == pool.end()) {
            pool.push_back(std::move(item));
        } else if (item.s_tot_x2 > existing->s_tot_x2) {
            // Re-scored duplicates keep the stronger judgment; ties keep the
            // earlier find.
            *existing = std::move(item);
        }
    }
    sort_pool(pool);
}

SufficiencyDecision CriticEngine::judge_sufficiency(const std::string& user_query,
                                                    const std::vector<EvidenceItem>& pool,
                                                    std::vector<std::string>* flags) {
    const auto messages = render_prompt(
        PromptId::sufficiency, {{"QUERY", user_query}, {"DOCUMENTS", serialize_pool(pool)}});
    const auto reply = gateway_.complete_json(AgentRole::sufficiency, messages,
                                              [](const nlohmann::json& j) {
                                                  return j.is_object() &&
                                                         j.contains("enough_documents") &&
                                                         j.at("enough_documents").is_boolean();
                                              });

    SufficiencyDecision decision;
    if (!reply.has_value()) {
        // Fail toward termination: an unusable judgment must not spin the
        // loop to its cap for nothing.
        decision.enough = true;
        decision.reason = "(sufficiency judgment unparsable; accepting current evidence)";
        add_flag(flags, "sufficiency_unparsable");
        return decision;
    }

    decision.enough = reply->at("enough_documents").get<bool>();
    if (reply->contains("reason") && reply->at("reason").is_string()) {
        decision.reason = reply->at("reason").get<std::string>();
    }
    if (!decision.enough && decision.reason.empty()) {
        decision.reason = "No reason was given for requesting more documents.";
        add_flag(flags, "sufficiency_missing_reason");
    }
    return decision;
}

std::vector<EvidenceItem> CriticEngine::select_final(const std::vector<EvidenceItem>& pool,
                                                     std::size_t n) const {
    std::vector<EvidenceItem> sorted = pool;
    sort_pool(sorted);
    if (sorted.size() > n) {
        sorted.resize(n);
    }
    return sorted;
}

} // namespace coral
