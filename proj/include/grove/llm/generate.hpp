#pragma once

#include <string>
#include <vector>

#include "grove/dsl/ast.hpp"
#include "grove/env/environment.hpp"
#include "grove/llm/client.hpp"
#include "grove/llm/prompt.hpp"

namespace grove::llm {

struct GenerationAttempt {
    std::string response;
    std::string source;  // extracted block, empty when none
    std::string error;   // empty on success
};

struct GenerationResult {
    dsl::RewardProgram program;
    std::string source;  // canonical text of `program`
    int attempts = 0;
    /// True when every attempt failed and the constant fallback was returned.
    bool degraded = false;
    std::vector<GenerationAttempt> log;
};

/// Source of the fallback program used in degraded mode.
inline constexpr const char* kFallbackSource = "return 0.0\n";

/// Asks the client for a reward program, parses and validates it, and on
/// failure re-prompts with the error appended, up to max_retries attempts.
/// Transport failures (after the client's own retries) and exhausted
/// attempts both end in degraded mode with the constant fallback.
GenerationResult generate_reward(const std::string& instruction, const env::EnvSpec& spec,
                                 const AgentDescription& agent, ChatClient& client, int max_retries = 3);

}  // namespace grove::llm
