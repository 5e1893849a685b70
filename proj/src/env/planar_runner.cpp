#include <random>

#include "grove/env/envs.hpp"
#include "grove/env/rotation.hpp"

namespace grove::env {
namespace {

constexpr int kRootX = 0;
constexpr int kRootY = 1;
constexpr int kVelX = 2;
constexpr int kVelY = 3;
constexpr int kLegs = 4;

const Eigen::Vector3d kLeftHipOffset(0.15, 0.0, -0.1);
const Eigen::Vector3d kRightHipOffset(-0.15, 0.0, -0.1);
const Eigen::Vector3d kThighOffset(0.0, 0.0, -0.45);

}  // namespace

PlanarRunner::PlanarRunner() {
    spec_.name = "planar_runner";
    spec_.joint_names = {"root", "left_hip", "left_knee", "right_hip", "right_knee"};
    spec_.parents = {-1, 0, 1, 0, 3};
    spec_.action_dim = 6;
    spec_.dt = 0.05;
    spec_.episode_length = 300;
    spec_.up_axis = 'z';
    spec_.check();
}

StateEmbed PlanarRunner::embed_of(const std::vector<double>& s, const StateEmbed* previous) const {
    StateEmbed e;
    e.joints.resize(5);
    auto& root = e.joints[0];
    root.pos = {s[kRootX], s[kRootY], kRootHeight};

    auto leg = [&](int hip_joint, const Eigen::Vector3d& hip_offset, double hip_angle, double knee_angle) {
        auto& hip = e.joints[hip_joint];
        auto& knee = e.joints[hip_joint + 1];
        hip.pos = root.pos + hip_offset;
        hip.rot = Eigen::Quaterniond(Eigen::AngleAxisd(hip_angle, Eigen::Vector3d::UnitX()));
        knee.pos = hip.pos + hip.rot * kThighOffset;
        knee.rot = (hip.rot * Eigen::Quaterniond(Eigen::AngleAxisd(knee_angle, Eigen::Vector3d::UnitX()))).normalized();
    };
    leg(1, kLeftHipOffset, s[kLegs + 0], s[kLegs + 1]);
    leg(3, kRightHipOffset, s[kLegs + 2], s[kLegs + 3]);

    root.vel = {s[kVelX], s[kVelY], 0.0};
    if (previous != nullptr) {
        for (int j = 1; j < 5; ++j) {
            e.joints[j].vel = (e.joints[j].pos - previous->joints[j].pos) / spec_.dt;
            e.joints[j].ang_vel = angular_velocity(previous->joints[j].rot, e.joints[j].rot, spec_.dt);
        }
    } else {
        for (int j = 1; j < 5; ++j) {
            e.joints[j].vel = root.vel;
        }
    }
    return e;
}

EnvState PlanarRunner::make_state(const Eigen::Vector2d& root, const Eigen::Vector2d& root_vel,
                                  const Eigen::Vector4d& leg_angles, int step_index) const {
    EnvState st;
    st.step_index = step_index;
    st.internal = {root.x(), root.y(), root_vel.x(), root_vel.y(),
                   leg_angles[0], leg_angles[1], leg_angles[2], leg_angles[3]};
    st.embed = embed_of(st.internal, nullptr);
    return st;
}

EnvState PlanarRunner::reset(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    Eigen::Vector4d legs;
    for (int i = 0; i < 4; ++i) {
        legs[i] = u(rng);
    }
    return make_state(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), legs);
}

StepResult PlanarRunner::step(const EnvState& state, std::span<const double> action) const {
    const auto a = clamp_action(action);
    std::vector<double> s = state.internal;
    const double dt = spec_.dt;
    s[kVelX] += kVelocityGain * (a[0] * kMaxSpeed - s[kVelX]) * dt;
    s[kVelY] += kVelocityGain * (a[1] * kMaxSpeed - s[kVelY]) * dt;
    s[kRootX] += s[kVelX] * dt;
    s[kRootY] += s[kVelY] * dt;
    for (int i = 0; i < 4; ++i) {
        s[kLegs + i] += kJointGain * (a[2 + i] * kJointRange - s[kLegs + i]) * dt;
    }

    StepResult out;
    out.state.step_index = state.step_index + 1;
    out.state.embed = embed_of(s, &state.embed);
    out.state.internal = std::move(s);
    out.done = out.state.step_index >= spec_.episode_length;
    return out;
}

}  // namespace grove::env
