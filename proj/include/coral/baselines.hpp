#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coral/loop.hpp"

namespace coral {

// Single-shot comparison pipelines: retrieve once (or not at all), then
// generate. No planning, critique, or sufficiency steps.
enum class BaselineKind {
    non_rag,     // generation only
    mono_rag,    // top-k from the query language's corpus
    t_rag,       // query translated to English, top-k from the English corpus
    multi_rag,   // pooled top-k across every indexed corpus
    cross_rag,   // multi_rag, then each selected chunk translated to English
    fixed_scope, // pooled top-k across a caller-chosen corpus set
};

std::string_view baseline_name(BaselineKind kind);
std::optional<BaselineKind> parse_baseline(std::string_view name);

struct BaselineSpec {
    BaselineKind kind = BaselineKind::non_rag;
    Lang query_lang = Lang::en;
    std::vector<Lang> scope; // fixed_scope only; must be non-empty there
};

class BaselinePipeline {
  public:
    BaselinePipeline(const CorpusStore& store, VectorIndex& index, AgentGateway& gateway,
                     LoopConfig config);

    RunResult run(const std::string& query, const BaselineSpec& spec);

    // One translator-role call; empty text short-circuits without a call and
    // a failed call falls back to the untranslated text with a flag.
    std::string translate(const std::string& text, Lang target,
                          std::vector<std::string>* flags = nullptr);

  private:
    const CorpusStore& store_;
    VectorIndex& index_;
    AgentGateway& gateway_;
    LoopConfig config_;
};

} // namespace coral
