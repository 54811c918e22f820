#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace coral {

enum class AgentRole { planner, critic, sufficiency, generator, translator };

std::string_view role_name(AgentRole role);
std::optional<AgentRole> parse_role(std::string_view name);

struct ChatMessage {
    std::string role; // "system" or "user"
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct RoleParams {
    double temperature = 0.6;
    double top_p = 1.0;
    int max_tokens = 32768;
    std::string effort_tag; // opaque pass-through, empty = omit

    bool operator==(const RoleParams&) const = default;
};

// planner/critic/sufficiency 0.6/1.0/32768; generator and translator
// 0.0/1.0/4096.
RoleParams default_role_params(AgentRole role);

struct AgentRequest {
    AgentRole role_tag = AgentRole::planner;
    std::vector<ChatMessage> messages;
    double temperature = 0.6;
    double top_p = 1.0;
    int max_tokens = 32768;
    std::string effort_tag;
};

struct AgentResponse {
    std::string text;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    bool truncated = false; // backend reported a length cutoff
};

class AgentBackend {
  public:
    virtual ~AgentBackend() = default;
    virtual AgentResponse complete(const AgentRequest& request) = 0;
};

struct ScriptedExchange {
    std::optional<AgentRole> role;       // request role must match when set
    std::optional<int> ordinal;          // 1-based request index must match when set
    std::optional<std::string> match;    // user prompt must contain when set
    std::string reply;
};

// Replays exchanges strictly in order; any mismatch or exhaustion throws
// ScriptError naming the role and request ordinal.
class ScriptedBackend : public AgentBackend {
  public:
    explicit ScriptedBackend(std::vector<ScriptedExchange> exchanges);

    // Accepts a JSON array of {role?, ordinal?, match?, reply | reply_json}.
    static std::vector<ScriptedExchange> parse_exchanges(const nlohmann::json& array);

    AgentResponse complete(const AgentRequest& request) override;

    std::size_t consumed() const { return next_; }
    bool exhausted() const { return next_ >= exchanges_.size(); }

  private:
    std::vector<ScriptedExchange> exchanges_;
    std::size_t next_ = 0;
    int requests_seen_ = 0;
};

// Extracts the first balanced top-level {...} (string- and escape-aware) and
// parses it; later candidates are tried if an earlier one fails to parse.
// Throws ParseError when no candidate parses.
nlohmann::json parse_json_object(const std::string& text);

// Per-run facade over a shared backend: applies role defaults, accumulates
// token usage and the set of roles seen, doubles max_tokens once on a
// truncation signal, and implements the JSON retry policy.
class AgentGateway {
  public:
    explicit AgentGateway(std::shared_ptr<AgentBackend> backend,
                          std::map<AgentRole, RoleParams> params = {});

    AgentResponse complete(AgentRole role, std::vector<ChatMessage> messages);

    // Parses the completion as a JSON object and validates it; on parse or
    // validation failure re-issues the request up to `json_retries` extra
    // times with an appended "Return only the JSON object." user message.
    // Returns nullopt once the budget is exhausted.
    std::optional<nlohmann::json> complete_json(
        AgentRole role, std::vector<ChatMessage> messages,
        const std::function<bool(const nlohmann::json&)>& valid = {},
        std::string* raw_text = nullptr);

    long long prompt_tokens() const { return prompt_tokens_; }
    long long completion_tokens() const { return completion_tokens_; }
    const std::set<AgentRole>& roles_seen() const { return roles_seen_; }
    int json_retries = 2;

  private:
    std::shared_ptr<AgentBackend> backend_;
    std::map<AgentRole, RoleParams> params_;
    long long prompt_tokens_ = 0;
    long long completion_tokens_ = 0;
    std::set<AgentRole> roles_seen_;
};

} // namespace coral
