#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "grove/data/dataset.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::data {

struct ClusterIndex {
    int k = 0;
    nn::Matrix centroids;         // k x dim
    std::vector<int> assignment;  // point -> cluster id

    /// Member lists per cluster (ascending point index).
    std::vector<std::vector<std::size_t>> members() const;
    std::vector<std::size_t> cluster_sizes() const;
};

struct KMeansOptions {
    int max_iters = 100;
    double tol = 1e-6;
};

struct KMeansReport {
    int iterations = 0;
    /// Within-cluster SSE after seeding and after each completed Lloyd iteration.
    std::vector<double> sse_history;
    int repaired_clusters = 0;
};

/// Squared distance from each row of `points` to its nearest centroid among
/// the first `count` rows of `centroids`.
std::vector<double> nearest_squared_distances(const nn::Matrix& points, const nn::Matrix& centroids, int count);

/// k-means++ seeding weights: probability of choosing each point as the next
/// centroid given the first `count` chosen centroids (D^2 weighting).
std::vector<double> seeding_probabilities(const nn::Matrix& points, const nn::Matrix& centroids, int count);

/// k-means++ seeding followed by Lloyd iterations in raw angle space.
/// Stops when the largest centroid shift is below tol or after max_iters.
/// Empty clusters are reseeded to the point farthest from its centroid.
/// Throws std::invalid_argument when there are fewer points than k.
ClusterIndex kmeans_pp(const nn::Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {},
                       KMeansReport* report = nullptr);
ClusterIndex kmeans_pp(const PoseDataset& dataset, int k, std::uint64_t seed, const KMeansOptions& options = {},
                       KMeansReport* report = nullptr);

double within_cluster_sse(const nn::Matrix& points, const ClusterIndex& index);

/// Versioned binary block ("GROVECLU").
void save_cluster_index(const ClusterIndex& index, const std::filesystem::path& path);
ClusterIndex load_cluster_index(const std::filesystem::path& path);

}  // namespace grove::data
