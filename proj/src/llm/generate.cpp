#include "grove/llm/generate.hpp"

#include <stdexcept>

#include "grove/dsl/dsl.hpp"

namespace grove::llm {

GenerationResult generate_reward(const std::string& instruction, const env::EnvSpec& spec,
                                 const AgentDescription& agent, ChatClient& client, int max_retries) {
    if (max_retries < 1) {
        throw std::invalid_argument("generate_reward: max_retries must be >= 1");
    }
    const PromptBundle prompt = build_prompt(spec, agent, instruction);
    std::vector<ChatMessage> messages = {{"system", prompt.system_text()}, {"user", prompt.user_text()}};

    GenerationResult result;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        GenerationAttempt log;
        result.attempts = attempt + 1;
        try {
            log.response = client.complete(messages);
        } catch (const http::TransportError& e) {
            log.error = std::string("transport: ") + e.what();
            result.log.push_back(std::move(log));
            break;
        }

        const auto block = extract_block(log.response);
        if (!block) {
            log.error = "no fenced ```reward block in the reply";
        } else {
            log.source = *block;
            try {
                dsl::RewardProgram program = dsl::parse(*block);
                dsl::validate(program, spec);
                result.program = std::move(program);
                result.source = dsl::print(result.program);
                result.log.push_back(std::move(log));
                return result;
            } catch (const dsl::DslError& e) {
                log.error = e.what();
            }
        }
        messages.push_back({"assistant", log.response});
        messages.push_back({"user", "The previous reward program was rejected: " + log.error +
                                        "\nReply with a corrected program in one ```reward block."});
        result.log.push_back(std::move(log));
    }

    result.degraded = true;
    result.program = dsl::parse(kFallbackSource);
    result.source = dsl::print(result.program);
    return result;
}

}  // namespace grove::llm
