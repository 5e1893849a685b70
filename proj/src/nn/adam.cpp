#include "grove/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace grove::nn {

Adam::Adam(std::size_t parameter_count, Params params)
    : params_(params), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void Adam::step(std::span<double> parameters, std::span<const double> gradients, double learning_rate) {
    if (parameters.size() != m_.size() || gradients.size() != m_.size()) {
        throw std::invalid_argument("Adam::step: parameter/gradient size mismatch");
    }
    ++step_;
    const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
        const double g = gradients[i];
        m_[i] = params_.beta1 * m_[i] + (1.0 - params_.beta1) * g;
        v_[i] = params_.beta2 * v_[i] + (1.0 - params_.beta2) * g * g;
        const double m_hat = m_[i] / c1;
        const double v_hat = v_[i] / c2;
        parameters[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + params_.epsilon);
    }
}

}  // namespace grove::nn
