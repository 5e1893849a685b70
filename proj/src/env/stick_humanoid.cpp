#include <random>

#include "grove/env/envs.hpp"
#include "grove/env/rotation.hpp"

namespace grove::env {

const std::vector<std::string>& smpl_bone_order_names() {
    static const std::vector<std::string> names = {
        "pelvis",         "torso",          "head",      "right_upper_arm", "right_lower_arm",
        "right_hand",     "left_upper_arm", "left_lower_arm", "left_hand",  "right_thigh",
        "right_shin",     "right_foot",     "left_thigh", "left_shin",      "left_foot",
    };
    return names;
}

StickHumanoid::StickHumanoid() : root_position_(0.0, 0.0, 1.0) {
    spec_.name = "stick_humanoid";
    spec_.joint_names = smpl_bone_order_names();
    spec_.parents = {-1, 0, 1, 1, 3, 4, 1, 6, 7, 0, 9, 10, 0, 12, 13};
    spec_.action_dim = 45;
    spec_.dt = 1.0 / 30.0;
    spec_.episode_length = 300;
    spec_.up_axis = 'z';
    spec_.check();

    // T-pose: arms along +-x, legs down -z, facing +y.
    offsets_ = {
        {0.0, 0.0, 0.0},     // pelvis
        {0.0, 0.0, 0.25},    // torso
        {0.0, 0.0, 0.30},    // head
        {-0.20, 0.0, 0.20},  // right_upper_arm
        {-0.30, 0.0, 0.0},   // right_lower_arm
        {-0.25, 0.0, 0.0},   // right_hand
        {0.20, 0.0, 0.20},   // left_upper_arm
        {0.30, 0.0, 0.0},    // left_lower_arm
        {0.25, 0.0, 0.0},    // left_hand
        {-0.10, 0.0, -0.05}, // right_thigh
        {0.0, 0.0, -0.45},   // right_shin
        {0.0, 0.0, -0.45},   // right_foot
        {0.10, 0.0, -0.05},  // left_thigh
        {0.0, 0.0, -0.45},   // left_shin
        {0.0, 0.0, -0.45},   // left_foot
    };
}

StateEmbed StickHumanoid::forward_kinematics(const std::vector<double>& angles) const {
    const int joints = spec_.num_joints();
    StateEmbed e;
    e.joints.resize(joints);
    for (int j = 0; j < joints; ++j) {
        const Eigen::Quaterniond local =
            euler_xyz_to_quat({angles[3 * j], angles[3 * j + 1], angles[3 * j + 2]});
        const int parent = spec_.parents[j];
        if (parent < 0) {
            e.joints[j].pos = root_position_;
            e.joints[j].rot = local;
        } else {
            const auto& p = e.joints[parent];
            e.joints[j].pos = p.pos + p.rot * offsets_[j];
            e.joints[j].rot = (p.rot * local).normalized();
        }
    }
    return e;
}

EnvState StickHumanoid::state_from_pose(const PoseVector& pose, int step_index) const {
    if (pose.rows() != spec_.num_joints()) {
        throw DimensionError("stick_humanoid: pose must have 15 rows");
    }
    EnvState st;
    st.step_index = step_index;
    st.internal.resize(pose.size());
    for (int j = 0; j < pose.rows(); ++j) {
        for (int c = 0; c < 3; ++c) {
            st.internal[3 * j + c] = pose(j, c);
        }
    }
    st.embed = forward_kinematics(st.internal);
    return st;
}

EnvState StickHumanoid::reset(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    PoseVector pose(spec_.num_joints(), 3);
    for (int j = 0; j < pose.rows(); ++j) {
        for (int c = 0; c < 3; ++c) {
            pose(j, c) = u(rng);
        }
    }
    return state_from_pose(pose);
}

StepResult StickHumanoid::step(const EnvState& state, std::span<const double> action) const {
    const auto a = clamp_action(action);
    std::vector<double> angles = state.internal;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        angles[i] += kGain * (a[i] * kJointRange - angles[i]) * spec_.dt;
    }

    StepResult out;
    out.state.step_index = state.step_index + 1;
    out.state.embed = forward_kinematics(angles);
    for (int j = 0; j < spec_.num_joints(); ++j) {
        auto& now = out.state.embed.joints[j];
        const auto& before = state.embed.joints[j];
        now.vel = (now.pos - before.pos) / spec_.dt;
        now.ang_vel = angular_velocity(before.rot, now.rot, spec_.dt);
    }
    out.state.internal = std::move(angles);
    out.done = out.state.step_index >= spec_.episode_length;
    return out;
}

}  // namespace grove::env
