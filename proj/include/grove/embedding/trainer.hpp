#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "grove/data/dataset.hpp"
#include "grove/data/kmeans.hpp"
#include "grove/embedding/mapper.hpp"
#include "grove/embedding/oracle.hpp"

namespace grove::embedding {

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 512;
    int epochs = 50;
    double warmup_fraction = 0.10;
    std::uint64_t seed = 0;
    /// Fraction of clusters held out whole for validation (0 disables).
    double validation_fraction = 0.10;
    int dim = 512;

    void check() const;
};

/// Linear warmup from 0 over the first round(warmup_fraction * total) steps,
/// then cosine decay to 0 at `total_steps`.
double learning_rate_at(std::size_t step, std::size_t total_steps, const TrainConfig& config);

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, double loss);
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<int> validation_clusters;
};

/// Holds out round(fraction * nonempty clusters) whole clusters, at least one
/// when fraction > 0 and more than one cluster exists.
Split cluster_disjoint_split(const data::ClusterIndex& index, double fraction, std::uint64_t seed);

struct EpochMetrics {
    int epoch = 0;
    double train_mse = 0.0;
    /// NaN when there is no validation split.
    double validation_cosine = 0.0;
    double last_learning_rate = 0.0;
};

struct TrainMetrics {
    std::vector<EpochMetrics> epochs;
    std::size_t steps = 0;
    std::size_t steps_per_epoch = 0;
    Split split;
};

struct TrainResult {
    MapperModel model;
    TrainMetrics metrics;
};

/// Mean row-wise cosine between model outputs and targets.
double mean_cosine(const MapperModel& model, const nn::Matrix& angles, const nn::Matrix& targets);

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Trains against precomputed per-pose targets (one row per pose). Batches
/// come from the balanced sampler restricted to training clusters.
TrainResult train_mapper(const data::PoseDataset& dataset, const data::ClusterIndex& clusters,
                         const nn::Matrix& targets, const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Same, with targets from the oracle (recorded in the model as oracle_seed).
TrainResult train_mapper(const data::PoseDataset& dataset, const data::ClusterIndex& clusters, const Oracle& oracle,
                         const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace grove::embedding
