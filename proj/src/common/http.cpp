#include "grove/common/http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace grove::http {

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("URL needs a scheme: '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const RequestOptions& options) {
    const Url target = split_url(url);
    httplib::Client client(target.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    if (!options.bearer_token.empty()) {
        client.set_bearer_token_auth(options.bearer_token);
    }

    const std::string payload = body.dump();
    auto backoff = options.retry.initial_backoff;
    std::string last_error;
    const int attempts = std::max(1, options.retry.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        const auto res = client.Post(target.path, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw TransportError("POST " + url + " failed with HTTP " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw TransportError("POST " + url + ": response is not JSON (" + e.what() + ")");
        }
    }
    throw TransportError("POST " + url + " failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

std::string key_from_env(const char* variable) {
    const char* v = std::getenv(variable);
    return v == nullptr ? std::string() : std::string(v);
}

}  // namespace grove::http
