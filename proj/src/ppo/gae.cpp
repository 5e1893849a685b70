#include <cmath>

#include "grove/ppo/ppo.hpp"

namespace grove::ppo {

GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const char> dones,
              double bootstrap_value, double gamma, double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || dones.size() != n) {
        throw std::invalid_argument("gae: rewards, values and dones must have equal length");
    }
    GaeResult out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double next_value = bootstrap_value;
    double next_adv = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double live = dones[k] ? 0.0 : 1.0;
        const double delta = rewards[k] + gamma * next_value * live - values[k];
        next_adv = delta + gamma * lambda * live * next_adv;
        out.advantages[k] = next_adv;
        out.returns[k] = next_adv + values[k];
        next_value = values[k];
    }
    return out;
}

void RolloutBuffer::compute_advantages(double gamma, double lambda) {
    const auto n = static_cast<std::size_t>(n_envs);
    const auto t_len = static_cast<std::size_t>(horizon);
    advantages.assign(size(), 0.0);
    returns.assign(size(), 0.0);
    std::vector<double> r(t_len), v(t_len);
    std::vector<char> d(t_len);
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t t = 0; t < t_len; ++t) {
            const std::size_t i = t * n + e;
            r[t] = rewards[i] + gamma * bootstrap[i];
            v[t] = values[i];
            d[t] = dones[i];
        }
        const GaeResult g = gae(r, v, d, last_values[e], gamma, lambda);
        for (std::size_t t = 0; t < t_len; ++t) {
            advantages[t * n + e] = g.advantages[t];
            returns[t * n + e] = g.returns[t];
        }
    }
}

std::vector<double> normalize_advantages(const std::vector<double>& advantages) {
    if (advantages.empty()) {
        return {};
    }
    double mean = 0.0;
    for (double a : advantages) {
        mean += a;
    }
    mean /= static_cast<double>(advantages.size());
    double var = 0.0;
    for (double a : advantages) {
        var += (a - mean) * (a - mean);
    }
    var /= static_cast<double>(advantages.size());
    const double denom = std::sqrt(var) + 1e-8;
    std::vector<double> out(advantages.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (advantages[i] - mean) / denom;
    }
    return out;
}

}  // namespace grove::ppo
