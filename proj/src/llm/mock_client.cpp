#include <array>
#include <charconv>

#include "grove/env/envs.hpp"
#include "grove/llm/client.hpp"
#include "grove/llm/prompt.hpp"

namespace grove::llm {

namespace {

std::string fenced(const std::string& body) { return "```reward\n" + body + "```\n"; }

const char* const kBoxing =
    "temp_hand_torso = 0.2\n"
    "left_hand_to_torso_dist = norm(left_hand.pos - torso.pos)\n"
    "right_hand_to_torso_dist = norm(right_hand.pos - torso.pos)\n"
    "left_guard = exp(-left_hand_to_torso_dist / temp_hand_torso)\n"
    "right_guard = exp(-right_hand_to_torso_dist / temp_hand_torso)\n"
    "temp_level = 0.1\n"
    "hands_level = exp(-abs(left_hand.pos.z - right_hand.pos.z) / temp_level)\n"
    "return (left_guard + right_guard + hands_level) / 3.0\n";

const char* const kArmsFolded =
    "temp_fold = 0.25\n"
    "left_hand_to_chest = norm(left_hand.pos - torso.pos)\n"
    "right_hand_to_chest = norm(right_hand.pos - torso.pos)\n"
    "left_fold = exp(-left_hand_to_chest / temp_fold)\n"
    "right_fold = exp(-right_hand_to_chest / temp_fold)\n"
    "return (left_fold + right_fold) / 2.0\n";

const char* const kPoleUpright =
    "upright = 1.0 - 2.0 * pole.rot.y * pole.rot.y\n"
    "temp_center = 1.0\n"
    "centered = exp(-abs(cart.pos.x) / temp_center)\n"
    "return (upright + centered) / 2.0\n";

const char* const kRunForward =
    "speed = root.vel.y\n"
    "return clamp(speed / 2.0, -1.0, 1.0)\n";

const char* const kNeutral = "# no specific constraint for this instruction\nreturn 0.0\n";

std::string number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), res.ptr);
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace

const std::map<std::string, std::string>& MockChatClient::library() {
    static const std::map<std::string, std::string> lib = {
        {"boxing with two arms", kBoxing},
        {"arms folded over chest", kArmsFolded},
        {"keep the pole upright", kPoleUpright},
        {"run forward", kRunForward},
    };
    return lib;
}

std::string MockChatClient::respond(const std::string& instruction, int attempt) {
    const auto& lib = library();
    const auto it = lib.find(instruction);
    const std::string body = it != lib.end() ? it->second : kNeutral;
    return "Attempt " + std::to_string(attempt + 1) + ". Here is the reward program:\n" + fenced(body);
}

std::string MockChatClient::complete(const std::vector<ChatMessage>& messages) {
    std::string instruction;
    for (const auto& m : messages) {
        if (m.role == "user") {
            instruction = instruction_from_prompt(m.content).value_or(m.content);
            break;
        }
    }
    return respond(instruction, attempt_index(messages));
}

const env::PoseVector& adversarial_pose() {
    static const env::PoseVector pose = [] {
        env::PoseVector p = env::PoseVector::Zero(15, 3);
        // Arms raised overhead, legs spread, trunk bent sideways.
        p.row(1) << 0.0, 0.0, 0.0;
        p.row(3) << 0.0, 1.3, 0.0;
        p.row(6) << 0.0, -1.3, 0.0;
        p.row(9) << 0.0, -0.8, 0.0;
        p.row(12) << 0.0, 0.8, 0.0;
        return p;
    }();
    return pose;
}

std::string AdversarialChatClient::program_for(const env::PoseVector& target_pose) {
    const env::StickHumanoid humanoid;
    const env::EnvState target = humanoid.state_from_pose(target_pose);
    const auto& names = humanoid.spec().joint_names;
    std::string out = "temp_match = 0.3\n";
    std::string total;
    for (std::size_t j = 0; j < names.size(); ++j) {
        const Eigen::Quaterniond& q = target.embed.joints[j].rot;
        const std::string n = names[j];
        out += "align_" + n + " = " + n + ".rot.x * " + number(q.x()) + " + " + n + ".rot.y * " + number(q.y()) +
               " + " + n + ".rot.z * " + number(q.z()) + " + " + n + ".rot.w * " + number(q.w()) + "\n";
        out += "match_" + n + " = exp((align_" + n + " * align_" + n + " - 1.0) / temp_match)\n";
        total += (total.empty() ? "" : " + ") + ("match_" + n);
    }
    out += "return (" + total + ") / " + number(static_cast<double>(names.size())) + "\n";
    return out;
}

AdversarialChatClient::AdversarialChatClient() : AdversarialChatClient(adversarial_pose()) {}

AdversarialChatClient::AdversarialChatClient(const env::PoseVector& target) : program_(program_for(target)) {}

std::string AdversarialChatClient::complete(const std::vector<ChatMessage>&) {
    return "Here is the reward program:\n" + fenced(program_);
}

}  // namespace grove::llm
