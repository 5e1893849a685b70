#include <algorithm>
#include <numeric>

#include "grove/ppo/ppo.hpp"

namespace grove::ppo {

PpoConfig PpoConfig::for_env(const env::EnvSpec& spec) {
    PpoConfig c;
    c.learning_rate = spec.name == "stick_humanoid" ? 5e-4 : 3e-4;
    return c;
}

void PpoConfig::check() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("PpoConfig: " + what); };
    if (!(clip > 0.0 && clip < 1.0)) fail("clip must be in (0, 1)");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must be in (0, 1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must be in [0, 1]");
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (!(kl_stop > 0.0)) fail("kl_stop must be positive");
    if (epochs < 1) fail("epochs must be >= 1");
    if (minibatches < 1) fail("minibatches must be >= 1");
    if (n_envs < 1) fail("n_envs must be >= 1");
    if (horizon < 1) fail("horizon must be >= 1");
    if (static_cast<long>(n_envs) * horizon < minibatches) fail("fewer samples than minibatches");
    if (value_coef < 0.0 || entropy_coef < 0.0) fail("loss coefficients must be non-negative");
}

namespace {

void gather_rows(const nn::Matrix& src, std::span<const std::size_t> idx, nn::Matrix& out) {
    out.resize(static_cast<Eigen::Index>(idx.size()), src.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = src.row(static_cast<Eigen::Index>(idx[k]));
    }
}

template <typename T>
std::vector<T> gather(const std::vector<T>& src, std::span<const std::size_t> idx) {
    std::vector<T> out(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out[k] = src[idx[k]];
    }
    return out;
}

}  // namespace

UpdateStats ppo_update(Policy& policy, PolicyOptimizer& optimizer, const RolloutBuffer& buffer,
                       const PpoConfig& config, std::mt19937_64& rng, const KlHook& kl_hook) {
    config.check();
    const std::size_t n = buffer.size();
    if (n == 0 || buffer.advantages.size() != n || buffer.returns.size() != n) {
        throw std::invalid_argument("ppo_update: buffer has no computed advantages");
    }
    const std::vector<double> adv = normalize_advantages(buffer.advantages);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t mb_count = static_cast<std::size_t>(config.minibatches);

    UpdateStats stats;
    nn::Matrix obs, act;
    int updates = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t m = 0; m < mb_count; ++m) {
            const std::size_t lo = m * n / mb_count;
            const std::size_t hi = (m + 1) * n / mb_count;
            const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
            gather_rows(buffer.obs, idx, obs);
            gather_rows(buffer.actions, idx, act);
            const PolicyGradient pg = policy_loss(policy, obs, act, gather(buffer.log_probs, idx), gather(adv, idx),
                                                  config.clip, config.entropy_coef);
            const ValueGradient vg = value_loss(policy, obs, gather(buffer.returns, idx), config.value_coef);
            optimizer.mean.step(policy.mean_net().parameters(), pg.mean_grad, config.learning_rate);
            optimizer.log_std.step(policy.log_std(), pg.log_std_grad, config.learning_rate);
            policy.clamp_log_std();
            optimizer.value.step(policy.value_net().parameters(), vg.grad, config.learning_rate);
            stats.policy_loss += pg.loss;
            stats.value_loss += vg.loss;
            stats.clip_fraction += pg.clip_fraction;
            ++updates;
        }
        stats.epochs_run = epoch + 1;

        // KL of the updated policy against the behaviour policy over the whole buffer.
        const nn::Matrix mu = policy.mean(buffer.obs);
        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const double log_ratio = policy.log_prob(mu.row(r), buffer.actions.row(r)) - buffer.log_probs[i];
            kl += std::expm1(log_ratio) - log_ratio;
        }
        kl /= static_cast<double>(n);
        if (kl_hook) {
            kl = kl_hook(epoch, kl);
        }
        stats.epoch_kl.push_back(kl);
        stats.approx_kl = kl;
        if (kl > config.kl_stop) {
            break;
        }
    }
    stats.policy_loss /= updates;
    stats.value_loss /= updates;
    stats.clip_fraction /= updates;
    stats.entropy = policy.entropy();
    return stats;
}

}  // namespace grove::ppo
