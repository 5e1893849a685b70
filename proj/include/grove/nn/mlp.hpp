#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace grove::nn {

enum class Activation { Identity, Gelu, Elu };

/// Exact (erf-based) GELU and its derivative.
double gelu(double x);
double gelu_grad(double x);
double elu(double x);
double elu_grad(double x);

/// Batched rows: one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Fully connected network: affine layers with `hidden` activation between
/// them and an identity output. All parameters live in one flat buffer
/// (per layer: W as out x in row-major, then b), so optimizers and
/// checkpoints can treat them as a single vector.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> dims, Activation hidden);

    /// PyTorch-style default init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    void init_uniform(std::mt19937_64& rng);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
    Activation activation() const { return hidden_; }

    std::size_t parameter_count() const { return params_.size(); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    Eigen::Map<const Matrix> weight(int layer) const;
    Eigen::Map<Matrix> weight(int layer);
    Eigen::Map<const Eigen::RowVectorXd> bias(int layer) const;
    Eigen::Map<Eigen::RowVectorXd> bias(int layer);

    /// Activations kept for backward().
    struct Tape {
        std::vector<Matrix> inputs;  // input to each layer
        std::vector<Matrix> pre;     // pre-activation of each layer
    };

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, Tape& tape) const;

    /// Accumulates dL/dparams into `grad` (size parameter_count()) given
    /// dL/doutput, and returns dL/dinput.
    Matrix backward(const Tape& tape, const Matrix& grad_out, std::span<double> grad) const;

private:
    std::size_t offset(int layer) const { return offsets_[layer]; }

    std::vector<int> dims_;
    Activation hidden_ = Activation::Identity;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

}  // namespace grove::nn
