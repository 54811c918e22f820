#pragma once

#include <map>
#include <string>

#include "coral/embedding.hpp" // HttpEndpointConfig
#include "coral/gateway.hpp"

namespace coral {

struct ChatBackendConfig {
    HttpEndpointConfig endpoint; // path defaults to /v1/chat/completions
    std::string default_model;
    std::map<AgentRole, std::string> models; // per-role overrides
};

// Chat-completions wire client: POST {model, messages, temperature, top_p,
// max_tokens} (+ reasoning_effort when the request carries an effort tag);
// reads choices[0].message.content, usage counts, and the length cutoff flag.
class HttpChatBackend : public AgentBackend {
  public:
    explicit HttpChatBackend(ChatBackendConfig config);

    AgentResponse complete(const AgentRequest& request) override;

  private:
    ChatBackendConfig config_;
};

} // namespace coral
