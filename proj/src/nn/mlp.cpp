#include "grove/nn/mlp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace grove::nn {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return cdf + x * pdf;
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

namespace {

void activate(Activation a, const Matrix& pre, Matrix& out) {
    switch (a) {
        case Activation::Identity: out = pre; break;
        case Activation::Gelu: out = pre.unaryExpr([](double v) { return gelu(v); }); break;
        case Activation::Elu: out = pre.unaryExpr([](double v) { return elu(v); }); break;
    }
}

void scale_by_derivative(Activation a, const Matrix& pre, Matrix& grad) {
    switch (a) {
        case Activation::Identity: break;
        case Activation::Gelu: grad.array() *= pre.unaryExpr([](double v) { return gelu_grad(v); }).array(); break;
        case Activation::Elu: grad.array() *= pre.unaryExpr([](double v) { return elu_grad(v); }).array(); break;
    }
}

}  // namespace

Mlp::Mlp(std::vector<int> dims, Activation hidden) : dims_(std::move(dims)), hidden_(hidden) {
    if (dims_.size() < 2) {
        throw std::invalid_argument("Mlp needs at least an input and an output dimension");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        if (dims_[l] <= 0 || dims_[l + 1] <= 0) {
            throw std::invalid_argument("Mlp layer dimensions must be positive");
        }
        offsets_.push_back(total);
        total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::init_uniform(std::mt19937_64& rng) {
    for (int l = 0; l < num_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        auto w = weight(l);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w.data()[i] = u(rng);
        }
        auto b = bias(l);
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b[i] = u(rng);
        }
    }
}

Eigen::Map<const Matrix> Mlp::weight(int layer) const {
    return {params_.data() + offset(layer), dims_[layer + 1], dims_[layer]};
}
Eigen::Map<Matrix> Mlp::weight(int layer) { return {params_.data() + offset(layer), dims_[layer + 1], dims_[layer]}; }

Eigen::Map<const Eigen::RowVectorXd> Mlp::bias(int layer) const {
    const std::size_t w = static_cast<std::size_t>(dims_[layer + 1]) * dims_[layer];
    return {params_.data() + offset(layer) + w, dims_[layer + 1]};
}
Eigen::Map<Eigen::RowVectorXd> Mlp::bias(int layer) {
    const std::size_t w = static_cast<std::size_t>(dims_[layer + 1]) * dims_[layer];
    return {params_.data() + offset(layer) + w, dims_[layer + 1]};
}

Matrix Mlp::forward(const Matrix& x) const {
    Tape tape;
    return forward(x, tape);
}

Matrix Mlp::forward(const Matrix& x, Tape& tape) const {
    if (x.cols() != input_dim()) {
        throw std::invalid_argument("Mlp::forward: expected input width " + std::to_string(input_dim()) + ", got " +
                                    std::to_string(x.cols()));
    }
    tape.inputs.resize(num_layers());
    tape.pre.resize(num_layers());
    Matrix h = x;
    for (int l = 0; l < num_layers(); ++l) {
        tape.inputs[l] = h;
        // Products run on Eigen-owned (aligned) copies: with a Map into the
        // flat buffer the vectorized loops peel by address, and the order of
        // the sums would then depend on where the buffer happened to land.
        const Matrix w = weight(l);
        Matrix z = h * w.transpose();
        z.rowwise() += bias(l);
        tape.pre[l] = z;
        if (l + 1 < num_layers()) {
            activate(hidden_, z, h);
        } else {
            h = std::move(z);
        }
    }
    return h;
}

Matrix Mlp::backward(const Tape& tape, const Matrix& grad_out, std::span<double> grad) const {
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("Mlp::backward: gradient buffer has the wrong size");
    }
    Matrix g = grad_out;
    for (int l = num_layers() - 1; l >= 0; --l) {
        if (l + 1 < num_layers()) {
            scale_by_derivative(hidden_, tape.pre[l], g);
        }
        const std::size_t wsize = static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
        const Matrix gw = g.transpose() * tape.inputs[l];
        const Eigen::RowVectorXd gb = g.colwise().sum();
        double* out = grad.data() + offset(l);
        for (std::size_t i = 0; i < wsize; ++i) {
            out[i] += gw.data()[i];
        }
        for (Eigen::Index i = 0; i < gb.size(); ++i) {
            out[wsize + static_cast<std::size_t>(i)] += gb[i];
        }
        const Matrix w = weight(l);
        Matrix next = g * w;
        g = std::move(next);
    }
    return g;
}

}  // namespace grove::nn
