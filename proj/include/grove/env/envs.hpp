#pragma once

#include "grove/env/environment.hpp"

namespace grove::env {

/// Classic cart-pole (rod pole, frictionless), integrated with RK4.
/// Joints: cart, pole. action[0] in [-1, 1] scales a 10 N horizontal force.
/// Internal state: (x, x_dot, theta, theta_dot).
class Cartpole final : public Environment {
public:
    static constexpr double kGravity = 9.8;
    static constexpr double kCartMass = 1.0;
    static constexpr double kPoleMass = 0.1;
    static constexpr double kHalfLength = 0.5;
    static constexpr double kForceScale = 10.0;
    static constexpr double kAngleLimit = 0.4;
    static constexpr double kPositionLimit = 2.4;

    Cartpole();
    const EnvSpec& spec() const override { return spec_; }
    EnvState reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, std::span<const double> action) const override;

    EnvState make_state(double x, double x_dot, double theta, double theta_dot, int step_index = 0) const;
    /// Total mechanical energy (kinetic + potential) of the internal state.
    static double energy(const EnvState& state);

private:
    EnvSpec spec_;
};

/// Ground-plane runner with a velocity-integrator root and four leg joints.
/// action[0..1]: commanded root velocity (x, y) as a fraction of kMaxSpeed;
/// action[2..5]: hip/knee pitch targets as a fraction of kJointRange.
/// Internal state: (x, y, vx, vy, left_hip, left_knee, right_hip, right_knee).
class PlanarRunner final : public Environment {
public:
    static constexpr double kMaxSpeed = 2.0;
    static constexpr double kVelocityGain = 4.0;
    static constexpr double kJointGain = 8.0;
    static constexpr double kJointRange = 1.0;
    static constexpr double kRootHeight = 1.0;

    PlanarRunner();
    const EnvSpec& spec() const override { return spec_; }
    EnvState reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, std::span<const double> action) const override;

    EnvState make_state(const Eigen::Vector2d& root, const Eigen::Vector2d& root_vel,
                        const Eigen::Vector4d& leg_angles, int step_index = 0) const;

private:
    StateEmbed embed_of(const std::vector<double>& internal, const StateEmbed* previous) const;
    EnvSpec spec_;
};

/// Kinematic 15-joint stick figure (SMPL bone order). Each joint carries
/// three Euler angles that track action targets with first-order dynamics
/// new = old + kGain * (target - old) * dt, target = action * kJointRange.
/// Internal state: the 45 current joint angles.
class StickHumanoid final : public Environment {
public:
    static constexpr double kGain = 8.0;
    static constexpr double kJointRange = 1.5707963267948966;

    StickHumanoid();
    const EnvSpec& spec() const override { return spec_; }
    EnvState reset(std::uint64_t seed) const override;
    StepResult step(const EnvState& state, std::span<const double> action) const override;

    /// State at rest with the given pose (zero velocities).
    EnvState state_from_pose(const PoseVector& pose, int step_index = 0) const;
    /// Rest-frame offset of each joint from its parent.
    const std::vector<Eigen::Vector3d>& offsets() const { return offsets_; }

private:
    StateEmbed forward_kinematics(const std::vector<double>& angles) const;
    EnvSpec spec_;
    std::vector<Eigen::Vector3d> offsets_;
    Eigen::Vector3d root_position_;
};

/// The 15 SMPL bone names in order.
const std::vector<std::string>& smpl_bone_order_names();

}  // namespace grove::env
