#include "grove/llm/client.hpp"

#include <algorithm>
#include <stdexcept>

namespace grove::llm {

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        throw std::invalid_argument("HttpChatClient: endpoint is required");
    }
    if (config_.api_key.empty()) {
        config_.api_key = http::key_from_env("GROVE_LLM_KEY");
    }
    config_.request.bearer_token = config_.api_key;
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }
    const nlohmann::json reply = http::post_json(config_.endpoint, body, config_.request);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw http::TransportError(std::string("chat response missing choices[0].message.content: ") + e.what());
    }
}

int attempt_index(const std::vector<ChatMessage>& messages) {
    const auto users = std::count_if(messages.begin(), messages.end(),
                                     [](const ChatMessage& m) { return m.role == "user"; });
    return std::max<int>(0, static_cast<int>(users) - 1);
}

ScriptedChatClient::ScriptedChatClient(std::vector<std::string> replies) : replies_(std::move(replies)) {
    if (replies_.empty()) {
        throw std::invalid_argument("ScriptedChatClient needs at least one reply");
    }
}

std::string ScriptedChatClient::complete(const std::vector<ChatMessage>& messages) {
    ++calls_;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(attempt_index(messages)), replies_.size() - 1);
    return replies_[i];
}

}  // namespace grove::llm
