#include <cmath>

#include "grove/ppo/ppo.hpp"

namespace grove::ppo {

PpoTrainer::PpoTrainer(const env::Environment& environment, const PpoConfig& config,
                       const PolicyConfig& policy_config)
    : config_((config.check(), config)),
      policy_(observation_dim(environment.spec()), environment.spec().action_dim, policy_config, config.seed),
      optimizer_(policy_),
      envs_(environment, config.n_envs, config.seed ^ 0xe7e7e7e7ull),
      rng_(config.seed + 0x51ull) {}

RolloutBuffer PpoTrainer::collect(const RewardFn& reward_fn, IterationStats& stats) {
    RolloutBuffer buf = collect_rollouts(policy_, envs_, reward_fn, config_.horizon, rng_);
    stats = IterationStats{};
    stats.index = iterations_;
    const double n = static_cast<double>(buf.size());
    double expert = 0.0;
    std::size_t expert_count = 0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        stats.mean_reward += buf.rewards[i] / n;
        stats.mean_rv += buf.r_v[i] / n;
        stats.mean_rl += buf.r_l[i] / n;
        if (!std::isnan(buf.expert[i])) {
            expert += buf.expert[i];
            ++expert_count;
        }
    }
    if (expert_count > 0) {
        stats.expert_reward_mean = expert / static_cast<double>(expert_count);
    }
    stats.mean_episode_return = recent_return();
    return buf;
}

void PpoTrainer::update(RolloutBuffer& buffer, IterationStats& stats, const KlHook& kl_hook) {
    buffer.compute_advantages(config_.gamma, config_.lambda);
    stats.update = ppo_update(policy_, optimizer_, buffer, config_, rng_, kl_hook);
    ++iterations_;
}

IterationStats PpoTrainer::iterate(const RewardFn& reward_fn) {
    IterationStats stats;
    RolloutBuffer buf = collect(reward_fn, stats);
    update(buf, stats);
    return stats;
}

double PpoTrainer::recent_return(int window) const {
    const auto& done = envs_.completed_returns();
    const std::size_t w = static_cast<std::size_t>(window > 0 ? window : config_.n_envs);
    if (done.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const std::size_t k = std::min(w, done.size());
    double s = 0.0;
    for (std::size_t i = done.size() - k; i < done.size(); ++i) {
        s += done[i];
    }
    return s / static_cast<double>(k);
}

}  // namespace grove::ppo
