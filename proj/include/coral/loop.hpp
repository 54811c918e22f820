#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coral/corpus_store.hpp"
#include "coral/critic.hpp"
#include "coral/gateway.hpp"
#include "coral/planner.hpp"
#include "coral/vector_index.hpp"

namespace coral {

struct LoopConfig {
    int k_per_corpus = 5;
    int final_k = 5;
    int max_iterations = 3;
    bool enable_query_rewrite = true;
    bool enable_dynamic_corpora = true;
    std::vector<Lang> fixed_langs; // retrieval scope when dynamic corpora are disabled
    ScoreWeightsX2 weights;
    ValidityThresholds thresholds;
    std::size_t evidence_char_limit = 2000;

    bool operator==(const LoopConfig&) const = default;
};

struct IterationRecord {
    int iteration = 0;
    RetrievalPlan plan;
    std::string retrieval_query;
    // Per-corpus hits in plan order; languages without a shard are skipped
    // (and flagged).
    std::vector<std::pair<Lang, std::vector<ScoredHit>>> hits;
    std::vector<Critique> critiques;
    std::size_t pool_size_after = 0;
    SufficiencyDecision decision;
    bool no_progress = false; // replanning aborted; no retrieval this round
    std::vector<std::string> flags;

    bool operator==(const IterationRecord&) const = default;
};

struct RunResult {
    std::string method; // "coral" or a baseline pipeline name
    std::string query;
    std::optional<char> answer; // extracted MCQ letter
    std::string answer_text;    // raw generator reply
    std::vector<EvidenceItem> evidence_used;
    std::vector<IterationRecord> trace; // loop runs only
    std::vector<Lang> scope;            // baseline retrieval scope
    std::string retrieval_query;        // baseline retrieval text (differs under query translation)
    std::vector<ScoredHit> retrieval_hits; // baseline single-shot hits, pooled order
    int iterations_run = 0;             // completed retrieve-critique-judge rounds
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    std::vector<std::string> flags;
    std::string uid; // filled by evaluation drivers

    bool operator==(const RunResult&) const = default;
};

// "[i] (lang) text" blocks, one per item, text truncated to char_limit bytes
// on a UTF-8 boundary; empty evidence renders the fixed no-documents line.
std::string render_evidence_blocks(const std::vector<EvidenceItem>& evidence,
                                   std::size_t char_limit);

inline constexpr const char* kNoEvidenceLine = "No relevant documents were retrieved.";

struct GenerationResult {
    std::string text;
    std::optional<char> answer;
};

// Renders the MCQ generation prompt over the evidence and extracts the answer
// letter from the reply.
GenerationResult generate_answer(AgentGateway& gateway, const std::string& query,
                                 const std::vector<EvidenceItem>& evidence,
                                 std::size_t char_limit);

// The feedback-driven retrieval loop: plan corpora, retrieve, critique, judge
// sufficiency, replan; then answer from the pooled evidence.
class CoralEngine {
  public:
    CoralEngine(const CorpusStore& store, VectorIndex& index, AgentGateway& gateway,
                LoopConfig config);

    RunResult run_query(const std::string& query);

    const LoopConfig& config() const { return config_; }

  private:
    const CorpusStore& store_;
    VectorIndex& index_;
    AgentGateway& gateway_;
    LoopConfig config_;
    PlannerEngine planner_;
    CriticEngine critic_;
};

} // namespace coral
