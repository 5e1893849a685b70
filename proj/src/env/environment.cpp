#include <algorithm>
#include <cmath>
#include <set>

#include "grove/env/envs.hpp"
#include "grove/env/rotation.hpp"

namespace grove::env {

int EnvSpec::joint_index(std::string_view joint) const {
    const auto it = std::find(joint_names.begin(), joint_names.end(), joint);
    return it == joint_names.end() ? -1 : static_cast<int>(it - joint_names.begin());
}

void EnvSpec::check() const {
    if (joint_names.empty()) {
        throw std::invalid_argument("env spec '" + name + "': needs at least one joint");
    }
    if (action_dim < 1) {
        throw std::invalid_argument("env spec '" + name + "': action_dim must be >= 1");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("env spec '" + name + "': dt must be positive");
    }
    if (episode_length <= 0) {
        throw std::invalid_argument("env spec '" + name + "': episode_length must be positive");
    }
    if (std::set<std::string>(joint_names.begin(), joint_names.end()).size() != joint_names.size()) {
        throw std::invalid_argument("env spec '" + name + "': joint names must be unique");
    }
    if (parents.size() != joint_names.size()) {
        throw std::invalid_argument("env spec '" + name + "': one parent entry per joint");
    }
    for (std::size_t j = 0; j < parents.size(); ++j) {
        if (parents[j] >= static_cast<int>(j)) {
            throw std::invalid_argument("env spec '" + name + "': parents must precede children");
        }
    }
}

std::vector<double> StateEmbed::flatten() const {
    std::vector<double> out;
    out.reserve(joints.size() * kChannelsPerJoint);
    for (const auto& j : joints) {
        out.insert(out.end(), {j.pos.x(), j.pos.y(), j.pos.z()});
        out.insert(out.end(), {j.rot.x(), j.rot.y(), j.rot.z(), j.rot.w()});
        out.insert(out.end(), {j.vel.x(), j.vel.y(), j.vel.z()});
        out.insert(out.end(), {j.ang_vel.x(), j.ang_vel.y(), j.ang_vel.z()});
    }
    return out;
}

bool StateEmbed::all_finite() const {
    return std::all_of(joints.begin(), joints.end(), [](const JointState& j) {
        return j.pos.allFinite() && j.rot.coeffs().allFinite() && j.vel.allFinite() && j.ang_vel.allFinite();
    });
}

std::vector<double> Environment::clamp_action(std::span<const double> action) const {
    if (static_cast<int>(action.size()) != spec().action_dim) {
        throw DimensionError("env '" + spec().name + "': expected action of length " +
                             std::to_string(spec().action_dim) + ", got " + std::to_string(action.size()));
    }
    std::vector<double> out(action.begin(), action.end());
    for (double& a : out) {
        a = std::isnan(a) ? 0.0 : std::clamp(a, -1.0, 1.0);
    }
    return out;
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
    if (name == "cartpole") {
        return std::make_unique<Cartpole>();
    }
    if (name == "planar_runner") {
        return std::make_unique<PlanarRunner>();
    }
    if (name == "stick_humanoid") {
        return std::make_unique<StickHumanoid>();
    }
    throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

std::vector<std::string> environment_names() { return {"cartpole", "planar_runner", "stick_humanoid"}; }

PoseVector pose_of(const EnvSpec& spec, const EnvState& state) {
    const int joints = spec.num_joints();
    if (static_cast<int>(state.embed.joints.size()) != joints) {
        throw DimensionError("pose_of: state has " + std::to_string(state.embed.joints.size()) +
                             " joints, spec '" + spec.name + "' has " + std::to_string(joints));
    }
    PoseVector pose(joints, 3);
    for (int j = 0; j < joints; ++j) {
        Eigen::Quaterniond local = state.embed.joints[j].rot;
        const int parent = spec.parents[j];
        if (parent >= 0) {
            local = state.embed.joints[parent].rot.conjugate() * local;
        }
        pose.row(j) = quat_to_euler_xyz(local).transpose();
    }
    return pose;
}

std::string default_expert_task(const EnvSpec& spec) {
    if (spec.name == "cartpole") {
        return "balance";
    }
    if (spec.name == "planar_runner") {
        return "run_forward";
    }
    return {};
}

double expert_reward(const EnvSpec& spec, const EnvState& state, std::string_view task) {
    if (spec.name == "cartpole" && task == "balance") {
        // cos(theta) for a rotation about y is the zz entry of the rotation matrix.
        const Eigen::Quaterniond& q = state.embed.joints.at(1).rot;
        return 1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y());
    }
    if (spec.name == "planar_runner" && task == "run_forward") {
        return state.embed.joints.at(0).vel.y();
    }
    throw std::invalid_argument("no expert reward for task '" + std::string(task) + "' on env '" + spec.name + "'");
}

double expert_reward_cap(const EnvSpec& spec) {
    if (spec.name == "planar_runner") {
        return PlanarRunner::kMaxSpeed;
    }
    return 1.0;
}

}  // namespace grove::env
