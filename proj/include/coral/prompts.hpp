#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coral/gateway.hpp"

namespace coral {

enum class PromptId {
    planner_initial,
    planner_revise,
    critic_score,
    sufficiency,
    generator_mcq,
    generator_short,
};

struct PromptTemplate {
    PromptId id;
    std::string_view name;
    std::string_view system; // empty = no system message
    std::string_view user;
};

const PromptTemplate& prompt_template(PromptId id);
const std::vector<PromptTemplate>& all_prompt_templates();

// The closed placeholder vocabulary. Brace groups not in this set (JSON
// skeletons inside the templates) are literal text.
const std::vector<std::string>& placeholder_names();

// Substitutes {NAME} sites for names in the closed set; throws ConfigError
// naming the placeholder when a needed binding is missing.
std::string render_template_text(std::string_view tpl,
                                 const std::map<std::string, std::string>& bindings);

// System (when present) + user message with all placeholders bound.
std::vector<ChatMessage> render_prompt(PromptId id,
                                       const std::map<std::string, std::string>& bindings);

} // namespace coral
