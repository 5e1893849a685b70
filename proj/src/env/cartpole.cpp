#include <array>
#include <cmath>
#include <random>

#include "grove/env/envs.hpp"

namespace grove::env {
namespace {

using Phase = std::array<double, 4>;

Phase derivatives(const Phase& s, double force) {
    constexpr double total_mass = Cartpole::kCartMass + Cartpole::kPoleMass;
    constexpr double pole_moment = Cartpole::kPoleMass * Cartpole::kHalfLength;
    const double sin_t = std::sin(s[2]);
    const double cos_t = std::cos(s[2]);
    const double temp = (force + pole_moment * s[3] * s[3] * sin_t) / total_mass;
    const double theta_acc = (Cartpole::kGravity * sin_t - cos_t * temp) /
                             (Cartpole::kHalfLength * (4.0 / 3.0 - Cartpole::kPoleMass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;
    return {s[1], x_acc, s[3], theta_acc};
}

Phase rk4(const Phase& s, double force, double dt) {
    auto axpy = [](const Phase& a, const Phase& b, double h) {
        return Phase{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]};
    };
    const Phase k1 = derivatives(s, force);
    const Phase k2 = derivatives(axpy(s, k1, dt / 2), force);
    const Phase k3 = derivatives(axpy(s, k2, dt / 2), force);
    const Phase k4 = derivatives(axpy(s, k3, dt), force);
    Phase out;
    for (int i = 0; i < 4; ++i) {
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

StateEmbed embed_of(const Phase& s) {
    StateEmbed e;
    e.joints.resize(2);
    auto& cart = e.joints[0];
    cart.pos = {s[0], 0.0, 0.0};
    cart.vel = {s[1], 0.0, 0.0};

    auto& pole = e.joints[1];
    const double l = Cartpole::kHalfLength;
    const double sin_t = std::sin(s[2]);
    const double cos_t = std::cos(s[2]);
    pole.pos = {s[0] + l * sin_t, 0.0, l * cos_t};
    pole.vel = {s[1] + l * cos_t * s[3], 0.0, -l * sin_t * s[3]};
    pole.rot = Eigen::Quaterniond(Eigen::AngleAxisd(s[2], Eigen::Vector3d::UnitY())).normalized();
    pole.ang_vel = {0.0, s[3], 0.0};
    return e;
}

}  // namespace

Cartpole::Cartpole() {
    spec_.name = "cartpole";
    spec_.joint_names = {"cart", "pole"};
    spec_.parents = {-1, 0};
    spec_.action_dim = 1;
    spec_.dt = 0.02;
    spec_.episode_length = 300;
    spec_.up_axis = 'z';
    spec_.check();
}

EnvState Cartpole::make_state(double x, double x_dot, double theta, double theta_dot, int step_index) const {
    EnvState st;
    st.step_index = step_index;
    st.internal = {x, x_dot, theta, theta_dot};
    st.embed = embed_of({x, x_dot, theta, theta_dot});
    return st;
}

EnvState Cartpole::reset(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    const double x = u(rng);
    const double x_dot = u(rng);
    const double theta = u(rng);
    const double theta_dot = u(rng);
    return make_state(x, x_dot, theta, theta_dot);
}

StepResult Cartpole::step(const EnvState& state, std::span<const double> action) const {
    const auto a = clamp_action(action);
    const Phase s{state.internal.at(0), state.internal.at(1), state.internal.at(2), state.internal.at(3)};
    const Phase next = rk4(s, kForceScale * a[0], spec_.dt);

    StepResult out;
    out.state = make_state(next[0], next[1], next[2], next[3], state.step_index + 1);
    out.done = out.state.step_index >= spec_.episode_length || std::abs(next[2]) > kAngleLimit ||
               std::abs(next[0]) > kPositionLimit;
    return out;
}

double Cartpole::energy(const EnvState& state) {
    const double x_dot = state.internal.at(1);
    const double theta = state.internal.at(2);
    const double theta_dot = state.internal.at(3);
    constexpr double m = kPoleMass;
    constexpr double l = kHalfLength;
    const double kinetic = 0.5 * (kCartMass + m) * x_dot * x_dot + m * l * x_dot * theta_dot * std::cos(theta) +
                           (2.0 / 3.0) * m * l * l * theta_dot * theta_dot;
    const double potential = m * kGravity * l * std::cos(theta);
    return kinetic + potential;
}

}  // namespace grove::env
