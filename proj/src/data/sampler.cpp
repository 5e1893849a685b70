#include "grove/data/sampler.hpp"

#include <stdexcept>

namespace grove::data {

BalancedSampler::BalancedSampler(const ClusterIndex& index, std::uint64_t seed) : rng_(seed) {
    build(index, nullptr);
}

BalancedSampler::BalancedSampler(const ClusterIndex& index, const std::vector<std::size_t>& allowed_points,
                                 std::uint64_t seed)
    : rng_(seed) {
    build(index, &allowed_points);
}

void BalancedSampler::build(const ClusterIndex& index, const std::vector<std::size_t>* allowed) {
    std::vector<std::vector<std::size_t>> all(static_cast<std::size_t>(index.k));
    if (allowed == nullptr) {
        for (std::size_t i = 0; i < index.assignment.size(); ++i) {
            all[static_cast<std::size_t>(index.assignment[i])].push_back(i);
        }
    } else {
        for (std::size_t i : *allowed) {
            all[static_cast<std::size_t>(index.assignment.at(i))].push_back(i);
        }
    }
    for (std::size_t c = 0; c < all.size(); ++c) {
        if (!all[c].empty()) {
            clusters_.push_back(std::move(all[c]));
            ids_.push_back(static_cast<int>(c));
        }
    }
}

std::size_t BalancedSampler::draw_cluster() {
    if (clusters_.empty()) {
        throw std::logic_error("BalancedSampler: no nonempty clusters");
    }
    std::uniform_int_distribution<std::size_t> pick(0, clusters_.size() - 1);
    return pick(rng_);
}

std::size_t BalancedSampler::draw() {
    const auto& members = clusters_[draw_cluster()];
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    return members[pick(rng_)];
}

std::vector<std::size_t> BalancedSampler::draw_batch(std::size_t batch_size) {
    std::vector<std::size_t> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        out.push_back(draw());
    }
    return out;
}

std::vector<std::size_t> balanced_sample(const ClusterIndex& index, std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) {
        return {};
    }
    BalancedSampler sampler(index, seed);
    return sampler.draw_batch(batch_size);
}

std::vector<env::PoseVector> balanced_sample(const ClusterIndex& index, const PoseDataset& dataset,
                                             std::size_t batch_size, std::uint64_t seed) {
    std::vector<env::PoseVector> out;
    for (std::size_t i : balanced_sample(index, batch_size, seed)) {
        out.push_back(dataset.pose(i));
    }
    return out;
}

}  // namespace grove::data
