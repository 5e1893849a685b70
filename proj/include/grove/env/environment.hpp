#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace grove::env {

/// Number of channels per joint in a flattened StateEmbed:
/// pos[0:3], rot[3:7] (x, y, z, w), vel[7:10], ang_vel[10:13].
inline constexpr int kChannelsPerJoint = 13;

struct EnvSpec {
    std::string name;
    std::vector<std::string> joint_names;
    /// Parent joint per joint (-1 for roots). Used to recover local rotations.
    std::vector<int> parents;
    int action_dim = 0;
    double dt = 0.0;
    int episode_length = 0;
    char up_axis = 'z';

    int num_joints() const { return static_cast<int>(joint_names.size()); }
    /// -1 when absent.
    int joint_index(std::string_view joint) const;
    /// Throws std::invalid_argument when an invariant is violated.
    void check() const;
};

struct JointState {
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    Eigen::Quaterniond rot = Eigen::Quaterniond::Identity();
    Eigen::Vector3d vel = Eigen::Vector3d::Zero();
    Eigen::Vector3d ang_vel = Eigen::Vector3d::Zero();
};

struct StateEmbed {
    std::vector<JointState> joints;

    std::vector<double> flatten() const;
    bool all_finite() const;
};

/// J x 3 joint-wise Euler angles (extrinsic XYZ), radians.
using PoseVector = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct EnvState {
    int step_index = 0;
    StateEmbed embed;
    /// Environment-specific dynamics state.
    std::vector<double> internal;
};

struct StepResult {
    EnvState state;
    bool done = false;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Stateless world model: all mutable data lives in EnvState, so one
/// Environment can serve any number of concurrently stepped states.
class Environment {
public:
    virtual ~Environment() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual EnvState reset(std::uint64_t seed) const = 0;
    /// Actions are clamped to [-1, 1] before the dynamics see them.
    virtual StepResult step(const EnvState& state, std::span<const double> action) const = 0;

protected:
    std::vector<double> clamp_action(std::span<const double> action) const;
};

std::unique_ptr<Environment> make_environment(std::string_view name);
std::vector<std::string> environment_names();

PoseVector pose_of(const EnvSpec& spec, const EnvState& state);

/// Task used by expert_reward when none is given explicitly; empty when the
/// environment has no analytic expert reward.
std::string default_expert_task(const EnvSpec& spec);

/// Evaluation-only task reward. cartpole/"balance": cos(pole angle);
/// planar_runner/"run_forward": root forward velocity v_y.
/// Unknown (env, task) pairs throw std::invalid_argument.
double expert_reward(const EnvSpec& spec, const EnvState& state, std::string_view task);

/// Upper reference of the expert reward, used as the reward-distance cap.
double expert_reward_cap(const EnvSpec& spec);

}  // namespace grove::env
