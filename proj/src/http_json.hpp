#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace coral {

struct HttpPostSpec {
    std::string base_url;
    std::string path;
    std::string api_key;
    int max_retries = 3;
    int backoff_ms = 250;
    int timeout_sec = 120;
};

// POSTs `body` as JSON and parses the JSON reply. Retries transport failures
// and 5xx/429 statuses with exponential backoff; throws TransportError once
// retries are exhausted and ParseError on a non-JSON reply body.
nlohmann::json http_post_json(const HttpPostSpec& spec, const nlohmann::json& body);

} // namespace coral
