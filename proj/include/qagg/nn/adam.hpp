#pragma once

#include <vector>

namespace qagg::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // decoupled, applied outside the adaptive step
};

struct AdamState {
    std::vector<std::vector<double>> m, v;
    long t = 0;
    static AdamState like(const std::vector<std::vector<double>>& params);
};

void adam_step(std::vector<std::vector<double>>& params,
               const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg);

} // namespace qagg::nn
