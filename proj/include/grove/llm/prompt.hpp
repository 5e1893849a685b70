#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grove/env/environment.hpp"

namespace grove::llm {

struct AgentDescription {
    std::vector<std::string> joints;  // index order
    std::string up_axis;
    std::vector<std::string> channels;
    std::string capability;
    int action_dim = 0;

    static AgentDescription from_spec(const env::EnvSpec& spec);
};

/// Seven ordered prompt sections.
struct PromptBundle {
    std::string role;
    std::string goal;
    std::string environment;
    std::string agent;
    std::string example_template;
    std::string design_principles;
    std::string task;

    /// (title, body) in order.
    std::vector<std::pair<std::string, std::string>> sections() const;
    /// Role section alone, sent as the system message.
    const std::string& system_text() const { return role; }
    /// Sections two to seven joined with headings, sent as the user message.
    std::string user_text() const;
};

/// Heading that introduces the task section; the instruction follows it.
inline constexpr std::string_view kTaskHeading = "## Task";

/// Deterministic. The example template is checked to parse and validate
/// against `spec`; throws std::invalid_argument for an empty instruction or
/// an agent description that does not match the EnvSpec.
PromptBundle build_prompt(const env::EnvSpec& spec, const AgentDescription& agent, const std::string& instruction);

/// Body of the first ```reward fenced block, else of the first untagged
/// fenced block; nullopt when neither exists.
std::optional<std::string> extract_block(std::string_view response);

/// Instruction text recovered from a user message built by build_prompt.
std::optional<std::string> instruction_from_prompt(std::string_view user_text);

}  // namespace grove::llm
