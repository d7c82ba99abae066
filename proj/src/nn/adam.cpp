#include "qagg/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace qagg::nn {

AdamState AdamState::like(const std::vector<std::vector<double>>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
        s.m.emplace_back(p.size(), 0.0);
        s.v.emplace_back(p.size(), 0.0);
    }
    return s;
}

void adam_step(std::vector<std::vector<double>>& params,
               const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: parameter/state layout mismatch");
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t s = 0; s < params.size(); ++s) {
        auto& p = params[s];
        const auto& g = grads[s];
        auto& m = state.m[s];
        auto& v = state.v[s];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
            if (cfg.weight_decay != 0.0) p[i] -= cfg.lr * cfg.weight_decay * p[i];
        }
    }
}

} // namespace qagg::nn
