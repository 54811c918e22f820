#include "http_json.hpp"

#include <httplib.h>

#include <chrono>
#include <memory>
#include <thread>

#include "coral/errors.hpp"

namespace coral {

namespace {

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

} // namespace

nlohmann::json http_post_json(const HttpPostSpec& spec, const nlohmann::json& body) {
    httplib::Client client(spec.base_url);
    client.set_connection_timeout(spec.timeout_sec, 0);
    client.set_read_timeout(spec.timeout_sec, 0);
    client.set_write_timeout(spec.timeout_sec, 0);

    httplib::Headers headers;
    if (!spec.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + spec.api_key);
    }
    const std::string payload = body.dump();

    std::string last_error;
    int delay_ms = spec.backoff_ms;
    for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms *= 2;
        }
        auto res = client.Post(spec.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (retryable_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw TransportError("HTTP " + std::to_string(res->status) + " from " + spec.base_url +
                                 spec.path + ": " + res->body.substr(0, 512));
        }
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            throw ParseError("non-JSON reply from " + spec.base_url + spec.path);
        }
        return parsed;
    }
    throw TransportError("retries exhausted for " + spec.base_url + spec.path + " (" + last_error +
                         ")");
}

} // namespace coral
