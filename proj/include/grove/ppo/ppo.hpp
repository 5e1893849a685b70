#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/ppo/policy.hpp"

namespace grove::ppo {

struct PpoConfig {
    double clip = 0.2;
    double gamma = 0.99;
    double lambda = 0.95;
    double learning_rate = 3e-4;
    double kl_stop = 0.008;
    int epochs = 4;
    int minibatches = 4;
    double value_coef = 0.5;
    double entropy_coef = 0.0;
    int n_envs = 16;
    int horizon = 64;
    std::uint64_t seed = 0;

    /// Learning rate 5e-4 for stick_humanoid, 3e-4 otherwise.
    static PpoConfig for_env(const env::EnvSpec& spec);
    void check() const;
};

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t,
/// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}, returns = A + V.
/// V_T is `bootstrap_value` (the value of the state after the last step).
GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const char> dones,
              double bootstrap_value, double gamma, double lambda);

/// Per-step reward terms. `total` drives learning; the rest is logged.
struct RewardSample {
    double total = 0.0;
    double r_v = 0.0;
    double r_l = 0.0;
    double expert = std::numeric_limits<double>::quiet_NaN();
};

/// Scores the post-step states of all environments at once (one row of
/// `actions` per environment) and fills `out` (same length).
using RewardFn = std::function<void(const std::vector<env::EnvState>& next, const nn::Matrix& actions,
                                    std::vector<RewardSample>& out)>;

class RewardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Storage for one iteration: entry (t, e) lives at index t * n_envs + e.
struct RolloutBuffer {
    int n_envs = 0;
    int horizon = 0;
    nn::Matrix obs;
    nn::Matrix actions;
    std::vector<double> log_probs;
    std::vector<double> rewards;
    /// V(final state) on time-limit truncation, zero elsewhere. GAE adds
    /// gamma times this to the reward.
    std::vector<double> bootstrap;
    std::vector<double> values;
    std::vector<char> dones;
    std::vector<double> r_v;
    std::vector<double> r_l;
    std::vector<double> expert;
    std::vector<double> last_values;  // V of the state after the last step, per env

    std::vector<double> advantages;
    std::vector<double> returns;

    std::size_t size() const { return log_probs.size(); }
    void compute_advantages(double gamma, double lambda);
};

class VecEnv;

/// Steps every environment `horizon` times with actions sampled from the
/// policy. Throws RewardError naming the step when a reward is not finite.
RolloutBuffer collect_rollouts(const Policy& policy, VecEnv& envs, const RewardFn& reward_fn, int horizon,
                               std::mt19937_64& rng, const ObservationScale& scale = {});

/// N independent environment states with automatic reset on done.
class VecEnv {
public:
    VecEnv(const env::Environment& environment, int n_envs, std::uint64_t seed);

    const env::Environment& environment() const { return env_; }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<env::EnvState>& states() const { return states_; }

    /// Returns of episodes finished so far, oldest first.
    const std::vector<double>& completed_returns() const { return completed_; }

    friend RolloutBuffer collect_rollouts(const Policy&, VecEnv&, const RewardFn&, int, std::mt19937_64&,
                                          const ObservationScale&);

private:
    env::EnvState fresh_state(int index);

    const env::Environment& env_;
    std::uint64_t seed_;
    std::vector<env::EnvState> states_;
    std::vector<double> running_;
    std::vector<std::uint64_t> episodes_;
    std::vector<double> completed_;
};

struct UpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
    int epochs_run = 0;
    std::vector<double> epoch_kl;
};

/// Test seam: maps (epoch index, measured KL) to the KL used for early stop.
using KlHook = std::function<double(int epoch, double kl)>;

/// Normalizes advantages, then runs up to config.epochs epochs of shuffled
/// minibatch updates, stopping after any epoch whose KL exceeds kl_stop.
UpdateStats ppo_update(Policy& policy, PolicyOptimizer& optimizer, const RolloutBuffer& buffer,
                       const PpoConfig& config, std::mt19937_64& rng, const KlHook& kl_hook = {});

/// Advantage normalization used by ppo_update: mean 0, std 1 (eps 1e-8).
std::vector<double> normalize_advantages(const std::vector<double>& advantages);

struct IterationStats {
    int index = 0;
    double mean_episode_return = std::numeric_limits<double>::quiet_NaN();
    double mean_reward = 0.0;
    double mean_rv = 0.0;
    double mean_rl = 0.0;
    double expert_reward_mean = std::numeric_limits<double>::quiet_NaN();
    UpdateStats update;
};

/// Owns policy, optimizer, environments and PRNG for one training run.
class PpoTrainer {
public:
    PpoTrainer(const env::Environment& environment, const PpoConfig& config, const PolicyConfig& policy_config);

    /// Collects one buffer and summarizes it (no update yet).
    RolloutBuffer collect(const RewardFn& reward_fn, IterationStats& stats);
    /// PPO update on a buffer from collect().
    void update(RolloutBuffer& buffer, IterationStats& stats, const KlHook& kl_hook = {});
    /// collect + update.
    IterationStats iterate(const RewardFn& reward_fn);

    Policy& policy() { return policy_; }
    const Policy& policy() const { return policy_; }
    const PpoConfig& config() const { return config_; }
    const VecEnv& envs() const { return envs_; }
    int iterations() const { return iterations_; }

    /// Mean of the most recent `window` completed episode returns (default n_envs).
    double recent_return(int window = 0) const;

private:
    PpoConfig config_;
    Policy policy_;
    PolicyOptimizer optimizer_;
    VecEnv envs_;
    std::mt19937_64 rng_;
    int iterations_ = 0;
};

}  // namespace grove::ppo
