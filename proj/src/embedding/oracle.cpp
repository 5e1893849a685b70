#include "grove/embedding/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace grove::embedding {

Oracle::Oracle(int joints, int dim, std::uint64_t seed) : joints_(joints), dim_(dim), seed_(seed) {
    if (joints < 1 || dim < 1) {
        throw std::invalid_argument("Oracle: joints and dim must be positive");
    }
    const int in = 6 * joints;
    // Scales chosen so the tanh units sit in their responsive range.
    const double w_std = 2.0 / std::sqrt(static_cast<double>(in));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> w_dist(0.0, w_std);
    std::normal_distribution<double> b_dist(0.0, 0.5);
    for (int v = 0; v < kViews; ++v) {
        nn::Matrix w(dim, in);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w.data()[i] = w_dist(rng);
        }
        Eigen::RowVectorXd b(dim);
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b[i] = b_dist(rng);
        }
        weights_.push_back(std::move(w));
        biases_.push_back(std::move(b));
    }
}

nn::Matrix Oracle::embed_batch(const nn::Matrix& angles) const {
    if (angles.cols() != 3 * joints_) {
        throw std::invalid_argument("Oracle: expected " + std::to_string(3 * joints_) + " angles per pose, got " +
                                    std::to_string(angles.cols()));
    }
    const Eigen::Index n = angles.rows();
    const Eigen::Index a = angles.cols();
    nn::Matrix lifted(n, 2 * a);
    lifted.leftCols(a) = angles.array().sin().matrix();
    lifted.rightCols(a) = angles.array().cos().matrix();

    nn::Matrix sum = nn::Matrix::Zero(n, dim_);
    for (int v = 0; v < kViews; ++v) {
        nn::Matrix h = lifted * weights_[v].transpose();
        h.rowwise() += biases_[v];
        h = h.array().tanh().matrix();
        sum += (h.array().colwise() / h.rowwise().norm().array()).matrix();
    }
    return (sum.array().colwise() / sum.rowwise().norm().array()).matrix();
}

Eigen::VectorXd Oracle::embed(const env::PoseVector& pose) const {
    if (pose.rows() != joints_) {
        throw std::invalid_argument("Oracle: pose has " + std::to_string(pose.rows()) + " joints, expected " +
                                    std::to_string(joints_));
    }
    nn::Matrix row = flatten_pose(pose);
    return embed_batch(row).row(0).transpose();
}

Eigen::VectorXd oracle_embed(const env::PoseVector& pose, std::uint64_t oracle_seed, int dim) {
    return Oracle(static_cast<int>(pose.rows()), dim, oracle_seed).embed(pose);
}

Eigen::RowVectorXd flatten_pose(const env::PoseVector& pose) {
    return Eigen::Map<const Eigen::RowVectorXd>(pose.data(), pose.size());
}

env::PoseVector unflatten_pose(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    if (row.size() % 3 != 0) {
        throw std::invalid_argument("unflatten_pose: length is not a multiple of 3");
    }
    env::PoseVector pose(row.size() / 3, 3);
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        pose.data()[i] = row[i];
    }
    return pose;
}

}  // namespace grove::embedding
