#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "grove/embedding/mapper.hpp"

namespace grove::testing {

/// Largest relative error between the analytic MSE gradient and a central
/// difference with step h, over the listed parameter indices (all when
/// empty). The denominator is floored at 1e-6 so that parameters with an
/// exactly vanishing gradient compare on absolute error.
inline double mse_gradient_error(nn::Mlp& net, const nn::Matrix& x, const nn::Matrix& y,
                                 std::vector<std::size_t> indices = {}, double h = 1e-5) {
    const auto analytic = embedding::mse_backward(net, x, y);
    auto p = net.parameters();
    if (indices.empty()) {
        indices.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) indices[i] = i;
    }
    double worst = 0.0;
    for (std::size_t i : indices) {
        const double keep = p[i];
        p[i] = keep + h;
        const double up = embedding::mse_loss(net.forward(x), y);
        p[i] = keep - h;
        const double down = embedding::mse_loss(net.forward(x), y);
        p[i] = keep;
        const double fd = (up - down) / (2.0 * h);
        const double g = analytic.grad[i];
        worst = std::max(worst, std::abs(fd - g) / std::max(1e-6, std::max(std::abs(fd), std::abs(g))));
    }
    return worst;
}

}  // namespace grove::testing
