#include "coral/gateway.hpp"

#include "coral/errors.hpp"

namespace coral {

ScriptedBackend::ScriptedBackend(std::vector<ScriptedExchange> exchanges)
    : exchanges_(std::move(exchanges)) {}

std::vector<ScriptedExchange> ScriptedBackend::parse_exchanges(const nlohmann::json& array) {
    if (!array.is_array()) {
        throw ParseError("scripted exchanges must be a JSON array");
    }
    std::vector<ScriptedExchange> out;
    out.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        const auto& item = array[i];
        const std::string where = "exchange " + std::to_string(i + 1);
        if (!item.is_object()) {
            throw ParseError(where + ": not an object");
        }
        ScriptedExchange ex;
        if (item.contains("role")) {
            auto role = parse_role(item["role"].get<std::string>());
            if (!role) {
                throw ParseError(where + ": unknown role '" +
                                 item["role"].get<std::string>() + "'");
            }
            ex.role = *role;
        }
        if (item.contains("ordinal")) {
            ex.ordinal = item["ordinal"].get<int>();
        }
        if (item.contains("match")) {
            ex.match = item["match"].get<std::string>();
        }
        const bool has_reply = item.contains("reply");
        const bool has_reply_json = item.contains("reply_json");
        if (has_reply == has_reply_json) {
            throw ParseError(where + ": exactly one of 'reply' or 'reply_json' required");
        }
        ex.reply = has_reply ? item["reply"].get<std::string>() : item["reply_json"].dump();
        out.push_back(std::move(ex));
    }
    return out;
}

AgentResponse ScriptedBackend::complete(const AgentRequest& request) {
    ++requests_seen_;
    const std::string where = "request " + std::to_string(requests_seen_) + " (role " +
                              std::string(role_name(request.role_tag)) + ")";
    if (next_ >= exchanges_.size()) {
        throw ScriptError("script exhausted at " + where);
    }
    const ScriptedExchange& ex = exchanges_[next_];
    if (ex.role && *ex.role != request.role_tag) {
        throw ScriptError("script expected role " + std::string(role_name(*ex.role)) + " at " +
                          where);
    }
    if (ex.ordinal && *ex.ordinal != requests_seen_) {
        throw ScriptError("script expected ordinal " + std::to_string(*ex.ordinal) + " at " +
                          where);
    }
    if (ex.match) {
        std::string user_text;
        for (const auto& m : request.messages) {
            if (m.role == "user") {
                user_text += m.content;
                user_text += '\n';
            }
        }
        if (user_text.find(*ex.match) == std::string::npos) {
            throw ScriptError("user prompt does not contain expected substring at " + where +
                              ": \"" + *ex.match + "\"");
        }
    }
    ++next_;
    return AgentResponse{ex.reply, 0, 0, false};
}

} // namespace coral
