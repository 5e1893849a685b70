#pragma once

#include <cstdint>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/nn/adam.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::ppo {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Fixed per-channel observation scales applied to the flattened StateEmbed.
struct ObservationScale {
    double pos = 1.0;
    double rot = 1.0;
    double vel = 0.5;
    double ang_vel = 0.2;
};

int observation_dim(const env::EnvSpec& spec);
/// Writes the scaled observation of one state into `out` (length observation_dim).
void observe(const env::StateEmbed& embed, Eigen::Ref<Eigen::RowVectorXd> out, const ObservationScale& scale = {});

struct PolicyConfig {
    std::vector<int> hidden;
    double init_log_std = -0.5;

    /// [400, 200, 100] for stick_humanoid, [256, 128, 64] otherwise.
    static PolicyConfig for_env(const env::EnvSpec& spec);
};

/// Diagonal Gaussian policy with an ELU mean network, a state-independent
/// log-std vector and a separate ELU value network.
class Policy {
public:
    Policy() = default;
    Policy(int obs_dim, int action_dim, const PolicyConfig& config, std::uint64_t seed);

    int obs_dim() const { return mean_net_.input_dim(); }
    int action_dim() const { return mean_net_.output_dim(); }

    nn::Mlp& mean_net() { return mean_net_; }
    const nn::Mlp& mean_net() const { return mean_net_; }
    nn::Mlp& value_net() { return value_net_; }
    const nn::Mlp& value_net() const { return value_net_; }
    std::vector<double>& log_std() { return log_std_; }
    const std::vector<double>& log_std() const { return log_std_; }

    /// Clamps every log-std entry into [kLogStdMin, kLogStdMax] (NaN -> min).
    void clamp_log_std();

    nn::Matrix mean(const nn::Matrix& obs) const { return mean_net_.forward(obs); }
    Eigen::VectorXd value(const nn::Matrix& obs) const;

    /// Sum over action dimensions of the Gaussian log density.
    double log_prob(const Eigen::Ref<const Eigen::RowVectorXd>& mean, const Eigen::Ref<const Eigen::RowVectorXd>& action) const;
    /// Entropy of the action distribution (state independent).
    double entropy() const;

private:
    nn::Mlp mean_net_;
    nn::Mlp value_net_;
    std::vector<double> log_std_;
};

struct PolicyGradient {
    double loss = 0.0;
    std::vector<double> mean_grad;     // mean-network parameters
    std::vector<double> log_std_grad;  // one per action dimension
    double clip_fraction = 0.0;
    /// mean((r - 1) - log r) over the batch.
    double approx_kl = 0.0;
};

/// Clipped surrogate loss -mean(min(r A, clip(r, 1-eps, 1+eps) A)) minus
/// entropy_coef * entropy, and its exact gradient.
PolicyGradient policy_loss(const Policy& policy, const nn::Matrix& obs, const nn::Matrix& actions,
                           const std::vector<double>& old_log_probs, const std::vector<double>& advantages,
                           double clip, double entropy_coef);

struct ValueGradient {
    double loss = 0.0;
    std::vector<double> grad;
};

/// value_coef * mean((V(s) - R)^2) and its gradient.
ValueGradient value_loss(const Policy& policy, const nn::Matrix& obs, const std::vector<double>& returns,
                         double value_coef);

/// Separate Adam states for the mean network, the log-std vector and the
/// value network.
struct PolicyOptimizer {
    PolicyOptimizer() = default;
    explicit PolicyOptimizer(const Policy& policy);

    nn::Adam mean;
    nn::Adam log_std;
    nn::Adam value;
};

}  // namespace grove::ppo
