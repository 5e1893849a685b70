#pragma once

#include <map>
#include <string>
#include <vector>

#include "grove/common/http.hpp"
#include "grove/env/environment.hpp"

namespace grove::llm {

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    /// Returns the assistant reply. Throws http::TransportError when the
    /// service stays unreachable.
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct HttpChatConfig {
    std::string endpoint;  // full URL of the chat-completions route
    std::string api_key;   // defaults to $GROVE_LLM_KEY when empty
    std::string model = "gpt-4o";
    double temperature = 0.2;
    http::RequestOptions request;
};

/// JSON chat-completion client: {model, messages, temperature} ->
/// choices[0].message.content.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(HttpChatConfig config);
    std::string complete(const std::vector<ChatMessage>& messages) override;

private:
    HttpChatConfig config_;
};

/// Offline client. The reply is a pure function of the instruction found in
/// the first user message and the attempt index (user messages - 1).
/// Known instructions map to canned programs; others get a neutral program.
class MockChatClient final : public ChatClient {
public:
    std::string complete(const std::vector<ChatMessage>& messages) override;

    /// Canned reward sources keyed by instruction.
    static const std::map<std::string, std::string>& library();
    static std::string respond(const std::string& instruction, int attempt);
};

/// Replays fixed replies: attempt i gets replies[min(i, size - 1)].
class ScriptedChatClient final : public ChatClient {
public:
    explicit ScriptedChatClient(std::vector<std::string> replies);
    std::string complete(const std::vector<ChatMessage>& messages) override;

    int calls() const { return calls_; }

private:
    std::vector<std::string> replies_;
    int calls_ = 0;
};

/// Always answers with a program that rewards matching every joint rotation
/// of one fixed stick-humanoid pose, whatever the instruction. Used to drive
/// R_V down on purpose and exercise regeneration.
class AdversarialChatClient final : public ChatClient {
public:
    AdversarialChatClient();
    explicit AdversarialChatClient(const env::PoseVector& target);

    std::string complete(const std::vector<ChatMessage>& messages) override;
    const std::string& program() const { return program_; }

    /// Pose-matching program for `target`: mean over joints of
    /// exp(((q . q_target)^2 - 1) / 0.3) with q the joint's world rotation.
    static std::string program_for(const env::PoseVector& target);

private:
    std::string program_;
};

/// Default target of AdversarialChatClient (arms raised, legs spread).
const env::PoseVector& adversarial_pose();

/// Attempt index implied by a conversation: number of user messages - 1.
int attempt_index(const std::vector<ChatMessage>& messages);

}  // namespace grove::llm
