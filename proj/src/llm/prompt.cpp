#include "grove/llm/prompt.hpp"

#include <stdexcept>

#include "grove/dsl/dsl.hpp"

namespace grove::llm {

namespace {

constexpr std::string_view kTaskLead = "Write the reward program for this instruction:\n";

std::string example_for(const env::EnvSpec& spec) {
    const std::string a = spec.joint_names.front();
    const std::string b = spec.joint_names.size() > 1 ? spec.joint_names[1] : a;
    return "```reward\n"
           "# one binding per line; scalar bindings are logged as components\n"
           "temp_reach = 0.5\n"
           "reach_dist = norm(" + b + ".pos - " + a + ".pos)\n"
           "reach = exp(-reach_dist / temp_reach)\n"
           "temp_still = 2.0\n"
           "still = exp(-norm(" + a + ".vel) / temp_still)\n"
           "return (reach + still) / 2.0\n"
           "```";
}

}  // namespace

AgentDescription AgentDescription::from_spec(const env::EnvSpec& spec) {
    AgentDescription d;
    d.joints = spec.joint_names;
    d.up_axis = std::string(1, spec.up_axis);
    d.channels = {"pos", "rot", "vel", "angvel"};
    d.action_dim = spec.action_dim;
    d.capability =
        "Rewards are written in a small expression language. Each joint exposes pos (3-vector, meters), "
        "rot (unit quaternion x, y, z, w), vel (3-vector, m/s) and angvel (3-vector, rad/s); append .x, .y, .z "
        "(or .w on rot) for one component. action[i] reads the i-th action entry. Available functions: exp, abs, "
        "norm, dot, min, max, clamp. There are no loops, conditionals or user-defined functions.";
    return d;
}

std::vector<std::pair<std::string, std::string>> PromptBundle::sections() const {
    return {{"Role", role},
            {"Goal", goal},
            {"Environment", environment},
            {"Agent", agent},
            {"Example template", example_template},
            {"Design principles", design_principles},
            {"Task", task}};
}

std::string PromptBundle::user_text() const {
    std::string out;
    const auto all = sections();
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (!out.empty()) {
            out += "\n\n";
        }
        out += "## " + all[i].first + "\n" + all[i].second;
    }
    return out;
}

PromptBundle build_prompt(const env::EnvSpec& spec, const AgentDescription& agent, const std::string& instruction) {
    if (instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw std::invalid_argument("build_prompt: instruction is empty");
    }
    if (agent.joints != spec.joint_names) {
        throw std::invalid_argument("build_prompt: agent joint list does not match env '" + spec.name + "'");
    }

    PromptBundle p;
    p.role =
        "You are a reward engineer for physics-based character control. You write compact, dense reward "
        "programs that a reinforcement learning agent can optimize.";
    p.goal =
        "Write one reward program whose value is high when the agent's current state matches the instruction "
        "and lower otherwise. The program is evaluated on every simulation step from the state reached after "
        "the action and the action itself.";
    p.environment = "Environment '" + spec.name + "': time step " + std::to_string(spec.dt) + " s, episodes of " +
                    std::to_string(spec.episode_length) + " steps, " + std::to_string(spec.action_dim) +
                    " action entries in [-1, 1].";

    std::string joints;
    for (std::size_t i = 0; i < agent.joints.size(); ++i) {
        joints += "  " + std::to_string(i) + ": " + agent.joints[i] + "\n";
    }
    std::string channels;
    for (const auto& c : agent.channels) {
        channels += (channels.empty() ? "" : ", ") + c;
    }
    p.agent = "Joints in index order:\n" + joints + "The up axis is " + agent.up_axis + ". Channels per joint: " +
              channels + ". Actions: action[0] to action[" + std::to_string(agent.action_dim - 1) + "].\n" +
              agent.capability;

    p.example_template = example_for(spec);
    // The template must stay a valid program for this environment.
    dsl::validate(dsl::parse(*extract_block(p.example_template)), spec);

    p.design_principles =
        "- Capture the essence of the instruction with as few terms as possible; do not reward unrelated motion.\n"
        "- Give every distance-like term its own temperature binding and shape it as exp(-distance / temperature).\n"
        "- Bind each reward component to a name so it can be logged, then combine components in the return "
        "expression, normalized so the total stays in [0, 1].\n"
        "- Reference only the joints listed above and action indices below the action count.\n"
        "- Answer with exactly one fenced code block tagged reward.";
    p.task = std::string(kTaskLead) + instruction;
    return p;
}

std::optional<std::string> extract_block(std::string_view response) {
    std::optional<std::string> untagged;
    std::size_t at = 0;
    while (true) {
        const std::size_t open = response.find("```", at);
        if (open == std::string_view::npos) {
            break;
        }
        const std::size_t eol = response.find('\n', open + 3);
        if (eol == std::string_view::npos) {
            break;
        }
        std::string_view tag = response.substr(open + 3, eol - open - 3);
        while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\r' || tag.back() == '\t')) {
            tag.remove_suffix(1);
        }
        const std::size_t close = response.find("```", eol + 1);
        if (close == std::string_view::npos) {
            break;
        }
        std::string body(response.substr(eol + 1, close - eol - 1));
        while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) {
            body.pop_back();
        }
        if (tag == "reward") {
            return body;
        }
        if (tag.empty() && !untagged) {
            untagged = std::move(body);
        }
        at = close + 3;
    }
    return untagged;
}

std::optional<std::string> instruction_from_prompt(std::string_view user_text) {
    const std::size_t heading = user_text.rfind(kTaskHeading);
    if (heading == std::string_view::npos) {
        return std::nullopt;
    }
    const std::size_t lead = user_text.find(kTaskLead, heading);
    if (lead == std::string_view::npos) {
        return std::nullopt;
    }
    return std::string(user_text.substr(lead + kTaskLead.size()));
}

}  // namespace grove::llm
