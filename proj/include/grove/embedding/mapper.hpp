#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "grove/env/environment.hpp"
#include "grove/nn/mlp.hpp"

namespace grove::embedding {

/// Pose -> embedding MLP: [3J, 256, 1024, D] with GELU between layers.
class MapperModel {
public:
    static constexpr int kHidden1 = 256;
    static constexpr int kHidden2 = 1024;

    MapperModel() = default;
    MapperModel(int joints, int dim);

    /// (3J*256 + 256) + (256*1024 + 1024) + (1024*D + D).
    static std::size_t parameter_count(int joints, int dim);

    int joints() const { return joints_; }
    int dim() const { return dim_; }
    nn::Mlp& net() { return net_; }
    const nn::Mlp& net() const { return net_; }

    void init(std::uint64_t seed);

    Eigen::VectorXd forward(const env::PoseVector& pose) const;
    /// One flattened pose per row.
    nn::Matrix forward(const nn::Matrix& angles) const;

    /// Seeds recorded in checkpoints.
    std::uint64_t seed = 0;
    std::uint64_t oracle_seed = 0;

private:
    int joints_ = 0;
    int dim_ = 0;
    nn::Mlp net_;
};

/// Mean over rows and columns of the squared error.
double mse_loss(const nn::Matrix& pred, const nn::Matrix& target);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad;  // same layout as the network parameters
};

/// MSE loss of net(inputs) against targets and its exact parameter gradient.
LossGradient mse_backward(const nn::Mlp& net, const nn::Matrix& inputs, const nn::Matrix& targets);
LossGradient backward(const MapperModel& model, const nn::Matrix& angles, const nn::Matrix& targets);

}  // namespace grove::embedding
