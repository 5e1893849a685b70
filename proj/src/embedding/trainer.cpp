#include "grove/embedding/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "grove/data/sampler.hpp"
#include "grove/nn/adam.hpp"

namespace grove::embedding {

void TrainConfig::check() const {
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be positive");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw std::invalid_argument("warmup_fraction must lie in [0, 1)");
    }
    if (batch_size == 0 || epochs < 1 || dim < 1) {
        throw std::invalid_argument("batch_size, epochs and dim must be positive");
    }
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
        throw std::invalid_argument("validation_fraction must lie in [0, 1)");
    }
}

double learning_rate_at(std::size_t step, std::size_t total_steps, const TrainConfig& config) {
    const auto warmup = static_cast<std::size_t>(std::llround(config.warmup_fraction * static_cast<double>(total_steps)));
    if (step < warmup) {
        return config.learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
    }
    if (total_steps <= warmup) {
        return config.learning_rate;
    }
    const double progress = static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup);
    return config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

DivergenceError::DivergenceError(std::size_t step, double loss)
    : std::runtime_error("mapper training diverged at step " + std::to_string(step) + " (loss " +
                         std::to_string(loss) + ")"),
      step_(step) {}

Split cluster_disjoint_split(const data::ClusterIndex& index, double fraction, std::uint64_t seed) {
    const auto sizes = index.cluster_sizes();
    std::vector<int> nonempty;
    for (int c = 0; c < index.k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) {
            nonempty.push_back(c);
        }
    }
    std::size_t held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(nonempty.size())));
    if (fraction > 0.0 && held == 0 && nonempty.size() > 1) {
        held = 1;
    }
    held = std::min(held, nonempty.empty() ? std::size_t{0} : nonempty.size() - 1);

    std::mt19937_64 rng(seed);
    std::shuffle(nonempty.begin(), nonempty.end(), rng);
    std::vector<char> is_val(static_cast<std::size_t>(index.k), 0);
    Split split;
    for (std::size_t i = 0; i < held; ++i) {
        is_val[static_cast<std::size_t>(nonempty[i])] = 1;
        split.validation_clusters.push_back(nonempty[i]);
    }
    std::sort(split.validation_clusters.begin(), split.validation_clusters.end());
    for (std::size_t i = 0; i < index.assignment.size(); ++i) {
        (is_val[static_cast<std::size_t>(index.assignment[i])] ? split.validation : split.train).push_back(i);
    }
    return split;
}

namespace {

nn::Matrix gather(const nn::Matrix& m, const std::vector<std::size_t>& rows) {
    nn::Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

}  // namespace

double mean_cosine(const MapperModel& model, const nn::Matrix& angles, const nn::Matrix& targets) {
    if (angles.rows() == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const nn::Matrix pred = model.forward(angles);
    double total = 0.0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i) {
        const double denom = pred.row(i).norm() * targets.row(i).norm();
        total += denom > 0.0 ? pred.row(i).dot(targets.row(i)) / denom : 0.0;
    }
    return total / static_cast<double>(pred.rows());
}

TrainResult train_mapper(const data::PoseDataset& dataset, const data::ClusterIndex& clusters,
                         const nn::Matrix& targets, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.check();
    if (dataset.empty()) {
        throw std::invalid_argument("train_mapper: dataset is empty");
    }
    if (clusters.assignment.size() != dataset.size()) {
        throw std::invalid_argument("train_mapper: cluster index was built over a different dataset");
    }
    if (targets.rows() != static_cast<Eigen::Index>(dataset.size()) || targets.cols() != config.dim) {
        throw std::invalid_argument("train_mapper: targets must have one row of width dim per pose");
    }

    TrainResult result{MapperModel(dataset.joints, config.dim), {}};
    MapperModel& model = result.model;
    model.init(config.seed);
    TrainMetrics& metrics = result.metrics;
    metrics.split = cluster_disjoint_split(clusters, config.validation_fraction, config.seed ^ 0x5be1u);

    const nn::Matrix val_x = gather(dataset.angles, metrics.split.validation);
    const nn::Matrix val_y = gather(targets, metrics.split.validation);
    const std::size_t n_train = metrics.split.train.size();
    metrics.steps_per_epoch = (n_train + config.batch_size - 1) / config.batch_size;
    const std::size_t total = metrics.steps_per_epoch * static_cast<std::size_t>(config.epochs);

    data::BalancedSampler sampler(clusters, metrics.split.train, config.seed + 1);
    nn::Adam adam(model.net().parameter_count());
    std::size_t step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        double lr = 0.0;
        for (std::size_t s = 0; s < metrics.steps_per_epoch; ++s, ++step) {
            const auto batch = sampler.draw_batch(config.batch_size);
            const LossGradient lg = backward(model, gather(dataset.angles, batch), gather(targets, batch));
            const bool finite = std::isfinite(lg.loss) &&
                                std::all_of(lg.grad.begin(), lg.grad.end(), [](double g) { return std::isfinite(g); });
            if (!finite) {
                throw DivergenceError(step, lg.loss);
            }
            lr = learning_rate_at(step, total, config);
            adam.step(model.net().parameters(), lg.grad, lr);
            loss_sum += lg.loss;
        }
        EpochMetrics em;
        em.epoch = epoch;
        em.train_mse = loss_sum / static_cast<double>(metrics.steps_per_epoch);
        em.validation_cosine = mean_cosine(model, val_x, val_y);
        em.last_learning_rate = lr;
        metrics.epochs.push_back(em);
        if (on_epoch) {
            on_epoch(em);
        }
    }
    metrics.steps = step;
    return result;
}

TrainResult train_mapper(const data::PoseDataset& dataset, const data::ClusterIndex& clusters, const Oracle& oracle,
                         const TrainConfig& config, const EpochCallback& on_epoch) {
    if (oracle.dim() != config.dim || oracle.joints() != dataset.joints) {
        throw std::invalid_argument("train_mapper: oracle shape does not match dataset/config");
    }
    TrainResult r = train_mapper(dataset, clusters, oracle.embed_batch(dataset.angles), config, on_epoch);
    r.model.oracle_seed = oracle.seed();
    return r;
}

}  // namespace grove::embedding
