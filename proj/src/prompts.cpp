#include "coral/prompts.hpp"

#include <algorithm>

#include "coral/errors.hpp"

namespace coral {

const std::vector<std::string>& placeholder_names() {
    static const std::vector<std::string> names = {
        "Docs", "Query", "USER_QUERY", "REWRITTEN_QUERY",
        "PREV_LANGS", "REASON", "QUERY", "DOCUMENTS",
    };
    return names;
}

std::string render_template_text(std::string_view tpl,
                                 const std::map<std::string, std::string>& bindings) {
    const auto& names = placeholder_names();
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            const std::size_t close = tpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const std::string name(tpl.substr(i + 1, close - i - 1));
                if (std::find(names.begin(), names.end(), name) != names.end()) {
                    auto it = bindings.find(name);
                    if (it == bindings.end()) {
                        throw ConfigError("missing prompt binding: " + name);
                    }
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i]);
        ++i;
    }
    return out;
}

std::vector<ChatMessage> render_prompt(PromptId id,
                                       const std::map<std::string, std::string>& bindings) {
    const PromptTemplate& tpl = prompt_template(id);
    std::vector<ChatMessage> messages;
    if (!tpl.system.empty()) {
        messages.push_back({"system", render_template_text(tpl.system, bindings)});
    }
    messages.push_back({"user", render_template_text(tpl.user, bindings)});
    return messages;
}

} // namespace coral
