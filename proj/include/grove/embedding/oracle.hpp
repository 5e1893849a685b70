#pragma once

#include <cstdint>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::embedding {

/// Deterministic stand-in for the render-then-embed pipeline. Each of the
/// kViews "views" maps the lifted pose f(theta) = [sin(theta), cos(theta)]
/// through a fixed random affine map and tanh, then unit-normalizes; the
/// mean over views is normalized again.
class Oracle {
public:
    static constexpr int kViews = 5;

    Oracle(int joints, int dim, std::uint64_t seed);

    int joints() const { return joints_; }
    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    Eigen::VectorXd embed(const env::PoseVector& pose) const;
    /// One pose per row (flattened joint-major angles); one embedding per row.
    nn::Matrix embed_batch(const nn::Matrix& angles) const;

private:
    int joints_;
    int dim_;
    std::uint64_t seed_;
    std::vector<nn::Matrix> weights_;          // dim x 6J per view
    std::vector<Eigen::RowVectorXd> biases_;   // dim per view
};

Eigen::VectorXd oracle_embed(const env::PoseVector& pose, std::uint64_t oracle_seed, int dim = 512);

/// Row-major flattening of a J x 3 pose.
Eigen::RowVectorXd flatten_pose(const env::PoseVector& pose);
env::PoseVector unflatten_pose(const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace grove::embedding
