#include "coral/baselines.hpp"

#include <algorithm>

#include "coral/errors.hpp"

namespace coral {

namespace {

constexpr const char* kBaselineNames[] = {"non_rag",   "mono_rag",  "t_rag",
                                          "multi_rag", "cross_rag", "fixed_scope"};

} // namespace

std::string_view baseline_name(BaselineKind kind) {
    return kBaselineNames[static_cast<int>(kind)];
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
    for (int i = 0; i < 6; ++i) {
        if (name == kBaselineNames[i]) {
            return static_cast<BaselineKind>(i);
        }
    }
    return std::nullopt;
}

BaselinePipeline::BaselinePipeline(const CorpusStore& store, VectorIndex& index,
                                   AgentGateway& gateway, LoopConfig config)
    : store_(store), index_(index), gateway_(gateway), config_(std::move(config)) {
    if (config_.final_k < 1) {
        throw ConfigError("baselines require final_k >= 1");
    }
    if (config_.evidence_char_limit == 0) {
        throw ConfigError("evidence_char_limit must be >= 1");
    }
}

std::string BaselinePipeline::translate(const std::string& text, Lang target,
                                        std::vector<std::string>* flags) {
    if (text.empty()) {
        return text;
    }
    const std::string instruction = "Translate the following text into " +
                                    std::string(lang_display_name(target)) +
                                    ". Output only the translation.";
    try {
        const AgentResponse response =
            gateway_.complete(AgentRole::translator, {{"user", instruction + "\n\n" + text}});
        return response.text;
    } catch (const Error&) {
        if (flags != nullptr) {
            flags->push_back("translation_failed");
        }
        return text;
    }
}

RunResult BaselinePipeline::run(const std::string& query, const BaselineSpec& spec) {
    RunResult run;
    run.method = std::string(baseline_name(spec.kind));
    run.query = query;
    const long long prompt_before = gateway_.prompt_tokens();
    const long long completion_before = gateway_.completion_tokens();

    if (spec.kind != BaselineKind::non_rag) {
        switch (spec.kind) {
        case BaselineKind::mono_rag:
            run.scope = {spec.query_lang};
            break;
        case BaselineKind::t_rag:
            run.scope = {Lang::en};
            break;
        case BaselineKind::multi_rag:
        case BaselineKind::cross_rag:
            run.scope = index_.shard_langs();
            break;
        case BaselineKind::fixed_scope:
            if (spec.scope.empty()) {
                throw ConfigError("fixed_scope requires a non-empty corpus scope");
            }
            run.scope = spec.scope;
            break;
        default:
            break;
        }

        run.retrieval_query = query;
        if (spec.kind == BaselineKind::t_rag) {
            run.retrieval_query = translate(query, Lang::en, &run.flags);
        }

        std::vector<Lang> searchable;
        for (Lang lang : run.scope) {
            if (index_.has_shard(lang)) {
                searchable.push_back(lang);
            } else {
                run.flags.push_back("no_shard_for:" + std::string(lang_code(lang)));
            }
        }

        if (!searchable.empty()) {
            const auto query_vec = index_.embed_batch({run.retrieval_query})[0];
            run.retrieval_hits = index_.search_pooled(query_vec, searchable,
                                                      static_cast<std::size_t>(config_.final_k));
        }

        for (const ScoredHit& hit : run.retrieval_hits) {
            const Chunk* chunk = store_.find_chunk(hit.lang, hit.chunk_id);
            if (chunk == nullptr) {
                run.flags.push_back("chunk_missing:" + hit.chunk_id);
                continue;
            }
            EvidenceItem item;
            item.chunk_id = hit.chunk_id;
            item.lang = hit.lang;
            item.text = chunk->text;
            item.retrieval_rank = hit.rank;
            run.evidence_used.push_back(std::move(item));
        }

        if (spec.kind == BaselineKind::cross_rag) {
            // Translation happens after selection, so ranking is unaffected.
            for (EvidenceItem& item : run.evidence_used) {
                item.text = translate(item.text, Lang::en, &run.flags);
            }
        }
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
