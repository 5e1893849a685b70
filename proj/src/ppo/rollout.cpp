#include <cmath>

#include "grove/ppo/ppo.hpp"

namespace grove::ppo {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

VecEnv::VecEnv(const env::Environment& environment, int n_envs, std::uint64_t seed) : env_(environment), seed_(seed) {
    if (n_envs < 1) {
        throw std::invalid_argument("VecEnv needs at least one environment");
    }
    running_.assign(static_cast<std::size_t>(n_envs), 0.0);
    episodes_.assign(static_cast<std::size_t>(n_envs), 0);
    for (int i = 0; i < n_envs; ++i) {
        states_.push_back(fresh_state(i));
    }
}

env::EnvState VecEnv::fresh_state(int index) {
    const auto i = static_cast<std::size_t>(index);
    const std::uint64_t s = mix(seed_ ^ mix(static_cast<std::uint64_t>(index) ^ mix(episodes_[i])));
    ++episodes_[i];
    return env_.reset(s);
}

RolloutBuffer collect_rollouts(const Policy& policy, VecEnv& envs, const RewardFn& reward_fn, int horizon,
                               std::mt19937_64& rng, const ObservationScale& scale) {
    if (horizon < 1) {
        throw std::invalid_argument("collect_rollouts: horizon must be >= 1");
    }
    const env::EnvSpec& spec = envs.environment().spec();
    const int n = envs.size();
    const int obs_dim = observation_dim(spec);
    const int act_dim = spec.action_dim;
    if (policy.obs_dim() != obs_dim || policy.action_dim() != act_dim) {
        throw env::DimensionError("collect_rollouts: policy shape does not match env '" + spec.name + "'");
    }
    const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(horizon);

    RolloutBuffer buf;
    buf.n_envs = n;
    buf.horizon = horizon;
    buf.obs.resize(static_cast<Eigen::Index>(total), obs_dim);
    buf.actions.resize(static_cast<Eigen::Index>(total), act_dim);
    buf.log_probs.resize(total);
    buf.rewards.resize(total);
    buf.bootstrap.assign(total, 0.0);
    buf.values.resize(total);
    buf.dones.resize(total);
    buf.r_v.resize(total);
    buf.r_l.resize(total);
    buf.expert.resize(total);

    const auto& log_std = policy.log_std();
    std::normal_distribution<double> normal(0.0, 1.0);
    nn::Matrix obs(n, obs_dim);
    nn::Matrix actions(n, act_dim);
    std::vector<env::EnvState> next(static_cast<std::size_t>(n));
    std::vector<char> done(static_cast<std::size_t>(n));
    std::vector<RewardSample> rewards(static_cast<std::size_t>(n));

    for (int t = 0; t < horizon; ++t) {
        for (int e = 0; e < n; ++e) {
            observe(envs.states_[static_cast<std::size_t>(e)].embed, obs.row(e), scale);
        }
        const nn::Matrix mean = policy.mean(obs);
        const Eigen::VectorXd values = policy.value(obs);
        for (int e = 0; e < n; ++e) {
            for (int d = 0; d < act_dim; ++d) {
                actions(e, d) = mean(e, d) + std::exp(log_std[static_cast<std::size_t>(d)]) * normal(rng);
            }
        }
        for (int e = 0; e < n; ++e) {
            const auto& a = actions.row(e);
            env::StepResult r = envs.env_.step(envs.states_[static_cast<std::size_t>(e)],
                                               std::span<const double>(a.data(), static_cast<std::size_t>(act_dim)));
            next[static_cast<std::size_t>(e)] = std::move(r.state);
            done[static_cast<std::size_t>(e)] = r.done ? 1 : 0;
        }
        rewards.assign(static_cast<std::size_t>(n), RewardSample{});
        reward_fn(next, actions, rewards);

        nn::Matrix truncated_obs;
        std::vector<int> truncated;
        for (int e = 0; e < n; ++e) {
            const std::size_t i = static_cast<std::size_t>(t) * n + e;
            const RewardSample& rs = rewards[static_cast<std::size_t>(e)];
            if (!std::isfinite(rs.total)) {
                throw RewardError("non-finite reward at rollout step " + std::to_string(t) + ", env " +
                                  std::to_string(e) + " (r_v " + std::to_string(rs.r_v) + ", r_l " +
                                  std::to_string(rs.r_l) + ")");
            }
            buf.obs.row(static_cast<Eigen::Index>(i)) = obs.row(e);
            buf.actions.row(static_cast<Eigen::Index>(i)) = actions.row(e);
            buf.log_probs[i] = policy.log_prob(mean.row(e), actions.row(e));
            buf.values[i] = values[e];
            buf.rewards[i] = rs.total;
            buf.r_v[i] = rs.r_v;
            buf.r_l[i] = rs.r_l;
            buf.expert[i] = rs.expert;
            buf.dones[i] = done[static_cast<std::size_t>(e)];
            envs.running_[static_cast<std::size_t>(e)] += rs.total;
            const env::EnvState& s = next[static_cast<std::size_t>(e)];
            if (done[static_cast<std::size_t>(e)] && s.step_index >= spec.episode_length) {
                truncated.push_back(e);
            }
        }
        // Time-limit ends are not failures: bootstrap them with the value of
        // the final state.
        if (!truncated.empty()) {
            truncated_obs.resize(static_cast<Eigen::Index>(truncated.size()), obs_dim);
            for (std::size_t k = 0; k < truncated.size(); ++k) {
                observe(next[static_cast<std::size_t>(truncated[k])].embed,
                        truncated_obs.row(static_cast<Eigen::Index>(k)), scale);
            }
            const Eigen::VectorXd tv = policy.value(truncated_obs);
            for (std::size_t k = 0; k < truncated.size(); ++k) {
                buf.bootstrap[static_cast<std::size_t>(t) * n + truncated[k]] = tv[static_cast<Eigen::Index>(k)];
            }
        }
        for (int e = 0; e < n; ++e) {
            const auto ue = static_cast<std::size_t>(e);
            if (done[ue]) {
                envs.completed_.push_back(envs.running_[ue]);
                envs.running_[ue] = 0.0;
                envs.states_[ue] = envs.fresh_state(e);
            } else {
                envs.states_[ue] = std::move(next[ue]);
            }
        }
    }

    for (int e = 0; e < n; ++e) {
        observe(envs.states_[static_cast<std::size_t>(e)].embed, obs.row(e), scale);
    }
    const Eigen::VectorXd last = policy.value(obs);
    buf.last_values.assign(last.data(), last.data() + last.size());
    return buf;
}

}  // namespace grove::ppo
