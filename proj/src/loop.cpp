#include "coral/loop.hpp"

#include <algorithm>

#include "coral/errors.hpp"
#include "coral/evalkit.hpp"
#include "coral/prompts.hpp"
#include "coral/util.hpp"

namespace coral {

namespace {

std::vector<Lang> normalize_scope(const std::vector<Lang>& langs) {
    std::vector<Lang> out;
    bool seen[kLangCount] = {};
    for (Lang lang : langs) {
        const auto idx = static_cast<std::size_t>(lang);
        if (!seen[idx]) {
            seen[idx] = true;
            out.push_back(lang);
        }
    }
    return out;
}

void append_flags(std::vector<std::string>& dst, const std::vector<std::string>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

} // namespace

std::string render_evidence_blocks(const std::vector<EvidenceItem>& evidence,
                                   std::size_t char_limit) {
    if (evidence.empty()) {
        return kNoEvidenceLine;
    }
    std::string out;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (i > 0) {
            out += "\n";
        }
        out += "[" + std::to_string(i + 1) + "] (" + std::string(lang_code(evidence[i].lang)) +
               ") " + truncate_utf8(evidence[i].text, char_limit);
    }
    return out;
}

GenerationResult generate_answer(AgentGateway& gateway, const std::string& query,
                                 const std::vector<EvidenceItem>& evidence,
                                 std::size_t char_limit) {
    const auto messages =
        render_prompt(PromptId::generator_mcq,
                      {{"Docs", render_evidence_blocks(evidence, char_limit)}, {"Query", query}});
    const AgentResponse response = gateway.complete(AgentRole::generator, messages);
    GenerationResult result;
    result.text = response.text;
    result.answer = extract_answer(response.text);
    return result;
}

CoralEngine::CoralEngine(const CorpusStore& store, VectorIndex& index, AgentGateway& gateway,
                         LoopConfig config)
    : store_(store), index_(index), gateway_(gateway), config_(std::move(config)),
      planner_(gateway), critic_(gateway, config_.weights, config_.thresholds) {
    if (config_.k_per_corpus < 1 || config_.final_k < 1 || config_.max_iterations < 1) {
        throw ConfigError("loop requires k_per_corpus, final_k, and max_iterations >= 1");
    }
    if (config_.evidence_char_limit == 0) {
        throw ConfigError("evidence_char_limit must be >= 1");
    }
    config_.fixed_langs = normalize_scope(config_.fixed_langs);
    if (!config_.enable_dynamic_corpora && config_.fixed_langs.empty()) {
        throw ConfigError("a fixed language scope is required when dynamic corpora are disabled");
    }
}

RunResult CoralEngine::run_query(const std::string& query) {
    RunResult run;
    run.method = "coral";
    run.query = query;
    const long long prompt_before = gateway_.prompt_tokens();
    const long long completion_before = gateway_.completion_tokens();

    std::vector<EvidenceItem> pool;
    std::string retrieval_query = query; // first pass retrieves with the user's words
    std::vector<Lang> prev_langs;

    for (int iteration = 1; iteration <= config_.max_iterations; ++iteration) {
        IterationRecord rec;
        rec.iteration = iteration;

        if (iteration == 1) {
            if (config_.enable_dynamic_corpora) {
                PlanOutcome outcome = planner_.plan_initial(query);
                rec.plan = outcome.plan;
                append_flags(rec.flags, outcome.flags);
            } else {
                rec.plan.iteration = 1;
                rec.plan.language_names = config_.fixed_langs;
            }
        } else {
            if (!config_.enable_dynamic_corpora && !config_.enable_query_rewrite) {
                // Neither the scope nor the query can change, so replanning
                // cannot make progress; stop without burning an agent call.
                rec.no_progress = true;
                rec.plan.iteration = iteration;
                rec.plan.language_names = prev_langs;
                rec.retrieval_query = retrieval_query;
                rec.flags.push_back("replanning_disabled_no_progress");
                append_flags(run.flags, rec.flags);
                run.trace.push_back(std::move(rec));
                break;
            }
            PlannerFeedback feedback;
            feedback.original_query = query;
            feedback.previous_retrieval_query = retrieval_query;
            feedback.previous_langs = prev_langs;
            feedback.reason = run.trace.back().decision.reason;
            PlanOutcome outcome =
                planner_.plan_revise(feedback, iteration, config_.enable_query_rewrite,
                                     config_.enable_dynamic_corpora, config_.fixed_langs);
            append_flags(rec.flags, outcome.flags);
            if (outcome.no_progress) {
                rec.no_progress = true;
                rec.plan = outcome.plan;
                rec.retrieval_query = retrieval_query;
                append_flags(run.flags, rec.flags);
                run.trace.push_back(std::move(rec));
                break;
            }
            rec.plan = outcome.plan;
            if (config_.enable_query_rewrite && rec.plan.rewritten_query.has_value()) {
                retrieval_query = *rec.plan.rewritten_query;
            }
        }
        rec.retrieval_query = retrieval_query;

        std::vector<Lang> searchable;
        for (Lang lang : rec.plan.language_names) {
            if (index_.has_shard(lang)) {
                searchable.push_back(lang);
            } else {
                rec.flags.push_back("no_shard_for:" + std::string(lang_code(lang)));
            }
        }

        if (!searchable.empty()) {
            try {
                const auto query_vec = index_.embed_batch({retrieval_query})[0];
                auto by_lang = index_.search(query_vec, searchable,
                                             static_cast<std::size_t>(config_.k_per_corpus));
                for (Lang lang : searchable) {
                    rec.hits.emplace_back(lang, std::move(by_lang[lang]));
                }
            } catch (const Error&) {
                // A degenerate rewritten query (nothing embeddable) retrieves
                // nothing rather than killing the run.
                rec.hits.clear();
                rec.flags.push_back("retrieval_failed");
            }
        }

        for (const auto& [lang, hits] : rec.hits) {
            for (const ScoredHit& hit : hits) {
                const Chunk* chunk = store_.find_chunk(lang, hit.chunk_id);
                if (chunk == nullptr) {
                    rec.flags.push_back("chunk_missing:" + hit.chunk_id);
                    continue;
                }
                rec.critiques.push_back(
                    critic_.score_document(retrieval_query, *chunk, hit.rank, &rec.flags));
            }
        }

        critic_.pool_evidence(pool, rec.critiques, iteration);
        rec.pool_size_after = pool.size();
        rec.decision = critic_.judge_sufficiency(query, pool, &rec.flags);

        prev_langs = rec.plan.language_names;
        run.iterations_run = iteration;
        append_flags(run.flags, rec.flags);
        const bool enough = rec.decision.enough;
        run.trace.push_back(std::move(rec));
        if (enough) {
            break;
        }
    }

    run.evidence_used = critic_.select_final(pool, static_cast<std::size_t>(config_.final_k));
    if (run.evidence_used.empty()) {
        run.flags.push_back("evidence_empty");
    }

    const GenerationResult generated =
        generate_answer(gateway_, query, run.evidence_used, config_.evidence_char_limit);
    run.answer_text = generated.text;
    run.answer = generated.answer;
    run.prompt_tokens = gateway_.prompt_tokens() - prompt_before;
    run.completion_tokens = gateway_.completion_tokens() - completion_before;
    return run;
}

} // namespace coral
