#pragma once

#include <chrono>
#include <functional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace grove::http {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RetryPolicy {
    int attempts = 3;
    /// Delay before the second attempt; doubles after each failure.
    std::chrono::milliseconds initial_backoff{1000};
};

struct RequestOptions {
    std::string bearer_token;
    std::chrono::seconds timeout{60};
    RetryPolicy retry;
};

/// "http://host:port/a/b" -> {"http://host:port", "/a/b"}.
struct Url {
    std::string origin;
    std::string path;
};
Url split_url(const std::string& url);

/// POSTs a JSON body and returns the parsed JSON response. Connection
/// failures, 429 and 5xx responses are retried with exponential backoff;
/// other non-2xx statuses and undecodable bodies fail immediately.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const RequestOptions& options);

/// Reads an API key from the environment; empty when unset.
std::string key_from_env(const char* variable);

}  // namespace grove::http
