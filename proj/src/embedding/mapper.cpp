#include "grove/embedding/mapper.hpp"

#include <stdexcept>

#include "grove/embedding/oracle.hpp"

namespace grove::embedding {

MapperModel::MapperModel(int joints, int dim)
    : joints_(joints), dim_(dim), net_({3 * joints, kHidden1, kHidden2, dim}, nn::Activation::Gelu) {}

std::size_t MapperModel::parameter_count(int joints, int dim) {
    const std::size_t in = 3 * static_cast<std::size_t>(joints);
    const std::size_t d = static_cast<std::size_t>(dim);
    return (in * kHidden1 + kHidden1) + (static_cast<std::size_t>(kHidden1) * kHidden2 + kHidden2) +
           (kHidden2 * d + d);
}

void MapperModel::init(std::uint64_t s) {
    seed = s;
    std::mt19937_64 rng(s);
    net_.init_uniform(rng);
}

Eigen::VectorXd MapperModel::forward(const env::PoseVector& pose) const {
    if (pose.rows() != joints_) {
        throw std::invalid_argument("mapper expects " + std::to_string(joints_) + " joints, pose has " +
                                    std::to_string(pose.rows()));
    }
    nn::Matrix row = flatten_pose(pose);
    return net_.forward(row).row(0).transpose();
}

nn::Matrix MapperModel::forward(const nn::Matrix& angles) const {
    if (angles.cols() != 3 * joints_) {
        throw std::invalid_argument("mapper expects " + std::to_string(3 * joints_) + " angles per row, got " +
                                    std::to_string(angles.cols()));
    }
    return net_.forward(angles);
}

double mse_loss(const nn::Matrix& pred, const nn::Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    if (pred.size() == 0) {
        return 0.0;
    }
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

LossGradient mse_backward(const nn::Mlp& net, const nn::Matrix& inputs, const nn::Matrix& targets) {
    nn::Mlp::Tape tape;
    const nn::Matrix pred = net.forward(inputs, tape);
    LossGradient out;
    out.loss = mse_loss(pred, targets);
    out.grad.assign(net.parameter_count(), 0.0);
    const nn::Matrix grad_out = (pred - targets) * (2.0 / static_cast<double>(pred.size()));
    net.backward(tape, grad_out, out.grad);
    return out;
}

LossGradient backward(const MapperModel& model, const nn::Matrix& angles, const nn::Matrix& targets) {
    return mse_backward(model.net(), angles, targets);
}

}  // namespace grove::embedding
