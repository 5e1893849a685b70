#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace grove::nn {

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    using Params = AdamParams;

    Adam() = default;
    explicit Adam(std::size_t parameter_count, Params params = {});

    void step(std::span<double> parameters, std::span<const double> gradients, double learning_rate);
    std::size_t step_count() const { return step_; }

private:
    Params params_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t step_ = 0;
};

}  // namespace grove::nn
