#pragma once

#include <string>
#include <vector>

#include "coral/corpus_store.hpp"
#include "coral/gateway.hpp"
#include "coral/lang.hpp"

namespace coral {

struct CriterionScores {
    int relevance = 0;
    int usefulness = 0;
    int clarity_specificity = 0;
    int compatibility = 0;

    bool operator==(const CriterionScores&) const = default;
};

// Aggregate weights in half-point units: s_tot doubled stays integral, so
// ranking never touches floating point. Defaults encode
// s_tot = relevance + 0.5 * (usefulness + clarity_specificity + compatibility).
struct ScoreWeightsX2 {
    int relevance = 2;
    int usefulness = 1;
    int clarity_specificity = 1;
    int compatibility = 1;

    bool operator==(const ScoreWeightsX2&) const = default;
};

struct ValidityThresholds {
    int per_criterion_min = 2;
    int total_min_x2 = 12; // 6.0 in half-point units

    bool operator==(const ValidityThresholds&) const = default;
};

// 2 * s_tot, exactly.
int total_score_x2(const CriterionScores& scores, const ScoreWeightsX2& weights = {});

// Valid iff every criterion >= per-criterion minimum and s_tot >= total
// minimum.
bool is_valid(const CriterionScores& scores, const ScoreWeightsX2& weights = {},
              const ValidityThresholds& thresholds = {});

struct Critique {
    CriterionScores scores;
    std::string text;
    std::string chunk_id;
    std::string doc_text; // scored content, carried into the evidence pool
    std::string query_used;
    Lang lang = Lang::en;
    int retrieval_rank = 0;
    bool clamped = false;    // agent emitted out-of-range or missing scores
    bool unparsable = false; // retry budget exhausted; scores forced to zero

    bool operator==(const Critique&) const = default;
};

struct EvidenceItem {
    std::string chunk_id;
    Lang lang = Lang::en;
    std::string text;
    CriterionScores scores;
    int s_tot_x2 = 0;
    std::string critique;
    int found_iteration = 0; // 0 = outside the loop (baseline pipelines)
    int retrieval_rank = 0;

    bool operator==(const EvidenceItem&) const = default;
};

struct SufficiencyDecision {
    bool enough = false;
    std::string reason;

    bool operator==(const SufficiencyDecision&) const = default;
};

// (s_tot desc, relevance desc, found_iteration asc, chunk_id asc).
void sort_pool(std::vector<EvidenceItem>& pool);

// Numbered (content, scores, critique) blocks for the sufficiency prompt;
// empty pool serializes as "No documents were retrieved."
std::string serialize_pool(const std::vector<EvidenceItem>& pool);

class CriticEngine {
  public:
    CriticEngine(AgentGateway& gateway, ScoreWeightsX2 weights = {},
                 ValidityThresholds thresholds = {});

    // Scores one chunk against the current retrieval query. Parse exhaustion
    // yields zero scores with critique "unparsable" (never valid).
    Critique score_document(const std::string& query, const Chunk& chunk, int retrieval_rank,
                            std::vector<std::string>* flags = nullptr);

    // Merges the valid critiques into the pool: duplicates by chunk_id keep
    // the higher s_tot (ties keep the earlier iteration); pool is re-sorted.
    void pool_evidence(std::vector<EvidenceItem>& pool, const std::vector<Critique>& batch,
                       int iteration) const;

    // Sufficiency judgment over the pooled evidence, keyed on the original
    // user query. Parse exhaustion forces enough=true so the loop terminates.
    SufficiencyDecision judge_sufficiency(const std::string& user_query,
                                          const std::vector<EvidenceItem>& pool,
                                          std::vector<std::string>* flags = nullptr);

    std::vector<EvidenceItem> select_final(const std::vector<EvidenceItem>& pool,
                                           std::size_t n = 5) const;

    const ScoreWeightsX2& weights() const { return weights_; }
    const ValidityThresholds& thresholds() const { return thresholds_; }

  private:
    AgentGateway& gateway_;
    ScoreWeightsX2 weights_;
    ValidityThresholds thresholds_;
};

} // namespace coral
