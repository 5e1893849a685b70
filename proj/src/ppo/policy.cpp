#include "grove/ppo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace grove::ppo {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

int observation_dim(const env::EnvSpec& spec) { return spec.num_joints() * env::kChannelsPerJoint; }

void observe(const env::StateEmbed& embed, Eigen::Ref<Eigen::RowVectorXd> out, const ObservationScale& scale) {
    if (out.size() != static_cast<Eigen::Index>(embed.joints.size()) * env::kChannelsPerJoint) {
        throw env::DimensionError("observe: output has the wrong length");
    }
    Eigen::Index k = 0;
    for (const auto& j : embed.joints) {
        for (int i = 0; i < 3; ++i) out[k++] = scale.pos * j.pos[i];
        out[k++] = scale.rot * j.rot.x();
        out[k++] = scale.rot * j.rot.y();
        out[k++] = scale.rot * j.rot.z();
        out[k++] = scale.rot * j.rot.w();
        for (int i = 0; i < 3; ++i) out[k++] = scale.vel * j.vel[i];
        for (int i = 0; i < 3; ++i) out[k++] = scale.ang_vel * j.ang_vel[i];
    }
}

PolicyConfig PolicyConfig::for_env(const env::EnvSpec& spec) {
    PolicyConfig c;
    c.hidden = spec.name == "stick_humanoid" ? std::vector<int>{400, 200, 100} : std::vector<int>{256, 128, 64};
    return c;
}

Policy::Policy(int obs_dim, int action_dim, const PolicyConfig& config, std::uint64_t seed) {
    std::vector<int> dims{obs_dim};
    dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
    std::vector<int> value_dims = dims;
    dims.push_back(action_dim);
    value_dims.push_back(1);
    mean_net_ = nn::Mlp(dims, nn::Activation::Elu);
    value_net_ = nn::Mlp(value_dims, nn::Activation::Elu);
    std::mt19937_64 rng(seed);
    mean_net_.init_uniform(rng);
    value_net_.init_uniform(rng);
    // Start with near-zero mean actions.
    const int last = mean_net_.num_layers() - 1;
    mean_net_.weight(last) *= 0.01;
    mean_net_.bias(last).setZero();
    log_std_.assign(static_cast<std::size_t>(action_dim), config.init_log_std);
    clamp_log_std();
}

void Policy::clamp_log_std() {
    for (double& s : log_std_) {
        s = std::isnan(s) ? kLogStdMin : std::clamp(s, kLogStdMin, kLogStdMax);
    }
}

Eigen::VectorXd Policy::value(const nn::Matrix& obs) const { return value_net_.forward(obs).col(0); }

double Policy::log_prob(const Eigen::Ref<const Eigen::RowVectorXd>& mean,
                        const Eigen::Ref<const Eigen::RowVectorXd>& action) const {
    double lp = 0.0;
    for (std::size_t d = 0; d < log_std_.size(); ++d) {
        const double z = (action[static_cast<Eigen::Index>(d)] - mean[static_cast<Eigen::Index>(d)]) *
                         std::exp(-log_std_[d]);
        lp += -0.5 * z * z - log_std_[d] - kHalfLog2Pi;
    }
    return lp;
}

double Policy::entropy() const {
    double h = 0.0;
    for (double s : log_std_) {
        h += s + 0.5 + kHalfLog2Pi;
    }
    return h;
}

PolicyGradient policy_loss(const Policy& policy, const nn::Matrix& obs, const nn::Matrix& actions,
                           const std::vector<double>& old_log_probs, const std::vector<double>& advantages,
                           double clip, double entropy_coef) {
    const Eigen::Index n = obs.rows();
    if (actions.rows() != n || static_cast<Eigen::Index>(old_log_probs.size()) != n ||
        static_cast<Eigen::Index>(advantages.size()) != n || n == 0) {
        throw std::invalid_argument("policy_loss: batch arrays disagree in length");
    }
    const auto& log_std = policy.log_std();
    const std::size_t act = log_std.size();
    nn::Mlp::Tape tape;
    const nn::Matrix mu = policy.mean_net().forward(obs, tape);

    PolicyGradient out;
    out.mean_grad.assign(policy.mean_net().parameter_count(), 0.0);
    out.log_std_grad.assign(act, 0.0);
    nn::Matrix grad_mu(n, static_cast<Eigen::Index>(act));
    const double inv_n = 1.0 / static_cast<double>(n);
    double clipped = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lp = policy.log_prob(mu.row(i), actions.row(i));
        const double log_ratio = lp - old_log_probs[static_cast<std::size_t>(i)];
        const double ratio = std::exp(log_ratio);
        const double a = advantages[static_cast<std::size_t>(i)];
        const double bounded = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
        const double surr1 = ratio * a;
        const double surr2 = bounded * a;
        out.loss -= std::min(surr1, surr2) * inv_n;
        out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
        if (std::abs(ratio - 1.0) > clip) {
            clipped += 1.0;
        }
        // The gradient flows only through the unclipped branch when it is the minimum.
        const double dlogp = surr1 <= surr2 ? -ratio * a * inv_n : 0.0;
        for (std::size_t d = 0; d < act; ++d) {
            const auto di = static_cast<Eigen::Index>(d);
            const double inv_var = std::exp(-2.0 * log_std[d]);
            const double diff = actions(i, di) - mu(i, di);
            grad_mu(i, di) = dlogp * diff * inv_var;
            out.log_std_grad[d] += dlogp * (diff * diff * inv_var - 1.0);
        }
    }
    out.loss -= entropy_coef * policy.entropy();
    for (double& g : out.log_std_grad) {
        g -= entropy_coef;
    }
    out.clip_fraction = clipped * inv_n;
    policy.mean_net().backward(tape, grad_mu, out.mean_grad);
    return out;
}

ValueGradient value_loss(const Policy& policy, const nn::Matrix& obs, const std::vector<double>& returns,
                         double value_coef) {
    const Eigen::Index n = obs.rows();
    if (static_cast<Eigen::Index>(returns.size()) != n || n == 0) {
        throw std::invalid_argument("value_loss: batch arrays disagree in length");
    }
    nn::Mlp::Tape tape;
    const nn::Matrix v = policy.value_net().forward(obs, tape);
    ValueGradient out;
    out.grad.assign(policy.value_net().parameter_count(), 0.0);
    nn::Matrix grad_v(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double err = v(i, 0) - returns[static_cast<std::size_t>(i)];
        out.loss += value_coef * err * err / static_cast<double>(n);
        grad_v(i, 0) = value_coef * 2.0 * err / static_cast<double>(n);
    }
    policy.value_net().backward(tape, grad_v, out.grad);
    return out;
}

PolicyOptimizer::PolicyOptimizer(const Policy& policy)
    : mean(policy.mean_net().parameter_count()),
      log_std(policy.log_std().size()),
      value(policy.value_net().parameter_count()) {}

}  // namespace grove::ppo
