#include "coral/http_chat.hpp"

#include "coral/errors.hpp"
#include "http_json.hpp"

namespace coral {

HttpChatBackend::HttpChatBackend(ChatBackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.base_url.empty()) {
        throw ConfigError("chat backend requires a base_url");
    }
    if (config_.endpoint.path.empty()) {
        config_.endpoint.path = "/v1/chat/completions";
    }
}

AgentResponse HttpChatBackend::complete(const AgentRequest& request) {
    std::string model = config_.default_model;
    if (auto it = config_.models.find(request.role_tag); it != config_.models.end()) {
        model = it->second;
    }
    if (model.empty()) {
        throw ConfigError("no model configured for role " +
                          std::string(role_name(request.role_tag)));
    }

    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    nlohmann::json body{
        {"model", model},
        {"messages", messages},
        {"temperature", request.temperature},
        {"top_p", request.top_p},
        {"max_tokens", request.max_tokens},
    };
    if (!request.effort_tag.empty()) {
        body["reasoning_effort"] = request.effort_tag;
    }

    HttpPostSpec spec{config_.endpoint.base_url, config_.endpoint.path,
                      config_.endpoint.api_key,  config_.endpoint.max_retries,
                      config_.endpoint.backoff_ms, config_.endpoint.timeout_sec};
    nlohmann::json reply = http_post_json(spec, body);

    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
        throw ParseError("chat reply has no choices");
    }
    const auto& choice = reply["choices"][0];
    AgentResponse resp;
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
        resp.text = choice["message"]["content"].get<std::string>();
    } else {
        throw ParseError("chat reply missing message content");
    }
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        resp.truncated = choice["finish_reason"].get<std::string>() == "length";
    }
    if (reply.contains("usage") && reply["usage"].is_object()) {
        const auto& usage = reply["usage"];
        if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number()) {
            resp.prompt_tokens = usage["prompt_tokens"].get<long>();
        }
        if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number()) {
            resp.completion_tokens = usage["completion_tokens"].get<long>();
        }
    }
    return resp;
}

} // namespace coral
