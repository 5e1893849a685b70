#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "grove/data/dataset.hpp"
#include "grove/data/kmeans.hpp"

namespace grove::data {

/// Two-stage uniform sampler: a cluster uniformly among the nonempty ones,
/// then a member uniformly within it. Each draw is independent.
class BalancedSampler {
public:
    BalancedSampler(const ClusterIndex& index, std::uint64_t seed);
    /// Restricts sampling to the given points (e.g. a training split); the
    /// clusters left nonempty are the ones sampled from.
    BalancedSampler(const ClusterIndex& index, const std::vector<std::size_t>& allowed_points, std::uint64_t seed);

    /// Index into the nonempty-cluster list.
    std::size_t draw_cluster();
    std::size_t draw();
    std::vector<std::size_t> draw_batch(std::size_t batch_size);

    std::size_t num_clusters() const { return clusters_.size(); }
    /// Cluster id of the i-th nonempty cluster.
    int cluster_id(std::size_t i) const { return ids_[i]; }

private:
    void build(const ClusterIndex& index, const std::vector<std::size_t>* allowed);

    std::vector<std::vector<std::size_t>> clusters_;
    std::vector<int> ids_;
    std::mt19937_64 rng_;
};

/// Batch of pose indices drawn with a fresh sampler seeded by `seed`.
std::vector<std::size_t> balanced_sample(const ClusterIndex& index, std::size_t batch_size, std::uint64_t seed);

/// Same, materialized as poses.
std::vector<env::PoseVector> balanced_sample(const ClusterIndex& index, const PoseDataset& dataset,
                                             std::size_t batch_size, std::uint64_t seed);

}  // namespace grove::data
