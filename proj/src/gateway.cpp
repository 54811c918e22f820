#include "coral/gateway.hpp"

#include "coral/errors.hpp"

namespace coral {

std::string_view role_name(AgentRole role) {
    switch (role) {
    case AgentRole::planner: return "planner";
    case AgentRole::critic: return "critic";
    case AgentRole::sufficiency: return "sufficiency";
    case AgentRole::generator: return "generator";
    case AgentRole::translator: return "translator";
    }
    return "unknown";
}

std::optional<AgentRole> parse_role(std::string_view name) {
    for (AgentRole r : {AgentRole::planner, AgentRole::critic, AgentRole::sufficiency,
                        AgentRole::generator, AgentRole::translator}) {
        if (role_name(r) == name) {
            return r;
        }
    }
    return std::nullopt;
}

RoleParams default_role_params(AgentRole role) {
    switch (role) {
    case AgentRole::planner:
    case AgentRole::critic:
    case AgentRole::sufficiency:
        return {0.6, 1.0, 32768, ""};
    case AgentRole::generator:
    case AgentRole::translator:
        return {0.0, 1.0, 4096, ""};
    }
    return {};
}

nlohmann::json parse_json_object(const std::string& text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '{') {
            continue;
        }
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    auto candidate = nlohmann::json::parse(
                        text.substr(start, i - start + 1), nullptr, false);
                    if (!candidate.is_discarded() && candidate.is_object()) {
                        return candidate;
                    }
                    break; // try the next '{'
                }
            }
        }
    }
    throw ParseError("no parsable JSON object in agent output");
}

AgentGateway::AgentGateway(std::shared_ptr<AgentBackend> backend,
                           std::map<AgentRole, RoleParams> params)
    : backend_(std::move(backend)), params_(std::move(params)) {
    if (!backend_) {
        throw ConfigError("gateway requires a backend");
    }
}

AgentResponse AgentGateway::complete(AgentRole role, std::vector<ChatMessage> messages) {
    AgentRequest req;
    req.role_tag = role;
    req.messages = std::move(messages);
    auto it = params_.find(role);
    const RoleParams p = it != params_.end() ? it->second : default_role_params(role);
    req.temperature = p.temperature;
    req.top_p = p.top_p;
    req.max_tokens = p.max_tokens;
    req.effort_tag = p.effort_tag;

    roles_seen_.insert(role);
    AgentResponse resp = backend_->complete(req);
    prompt_tokens_ += resp.prompt_tokens;
    completion_tokens_ += resp.completion_tokens;
    if (resp.truncated) {
        // One enlarged retry on a length cutoff.
        req.max_tokens *= 2;
        resp = backend_->complete(req);
        prompt_tokens_ += resp.prompt_tokens;
        completion_tokens_ += resp.completion_tokens;
    }
    return resp;
}

std::optional<nlohmann::json> AgentGateway::complete_json(
    AgentRole role, std::vector<ChatMessage> messages,
    const std::function<bool(const nlohmann::json&)>& valid, std::string* raw_text) {
    std::vector<ChatMessage> attempt_messages = messages;
    for (int attempt = 0; attempt <= json_retries; ++attempt) {
        if (attempt > 0) {
            attempt_messages = messages;
            attempt_messages.push_back({"user", "Return only the JSON object."});
        }
        AgentResponse resp = complete(role, attempt_messages);
        if (raw_text) {
            *raw_text = resp.text;
        }
        try {
            nlohmann::json parsed = parse_json_object(resp.text);
            if (!valid || valid(parsed)) {
                return parsed;
            }
        } catch (const ParseError&) {
        }
    }
    return std::nullopt;
}

} // namespace coral
