#include "qagg/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace qagg::nn {

void MlpSpec::validate() const {
    if (layer_sizes.size() < 3) {
        throw std::invalid_argument("MlpSpec: need input, at least one hidden, and output width");
    }
    for (int w : layer_sizes) {
        if (w <= 0) throw std::invalid_argument("MlpSpec: widths must be positive");
    }
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("MlpSpec: dropout in [0,1)");
}

MlpParams MlpParams::init(const MlpSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    MlpParams p;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const auto d_in = static_cast<std::size_t>(spec.layer_sizes[l]);
        const auto d_out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
        std::vector<double> W(d_out * d_in);
        for (auto& w : W) w = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(W));
        p.biases.emplace_back(d_out, 0.0);
    }
    return p;
}

std::vector<std::vector<double>> MlpParams::flatten() const {
    std::vector<std::vector<double>> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(weights[l]);
        out.push_back(biases[l]);
    }
    return out;
}

void MlpParams::unflatten(const std::vector<std::vector<double>>& flat) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] = flat[2 * l];
        biases[l] = flat[2 * l + 1];
    }
}

MlpBinding bind_mlp(Tape& tape, const MlpParams& params) {
    MlpBinding b;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const std::size_t d_out = params.biases[l].size();
        const std::size_t d_in = params.weights[l].size() / d_out;
        b.w_ids.push_back(tape.param(params.weights[l], d_out, d_in));
        b.b_ids.push_back(tape.param(params.biases[l], 1, d_out));
    }
    return b;
}

NodeId mlp_forward(Tape& tape, const MlpBinding& bind, const MlpSpec& spec, NodeId x,
                   bool train_mode, Rng* dropout_rng) {
    NodeId h = x;
    const std::size_t n_layers = bind.w_ids.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        h = tape.linear(h, bind.w_ids[l], bind.b_ids[l]);
        if (l + 1 < n_layers) {
            h = tape.elu(h);
            if (train_mode && spec.dropout > 0.0) {
                h = tape.dropout(h, spec.dropout, *dropout_rng);
            }
        }
    }
    return h;
}

std::vector<double> mlp_eval(const MlpParams& params, const MlpSpec& spec,
                             std::span<const double> X, std::size_t n_rows) {
    Tape t;
    const auto d = static_cast<std::size_t>(spec.input_dim());
    NodeId x = t.input(std::vector<double>(X.begin(), X.end()), n_rows, d);
    MlpBinding b = bind_mlp(t, params);
    NodeId out = mlp_forward(t, b, spec, x, false, nullptr);
    auto v = t.val(out);
    return {v.begin(), v.end()};
}

} // namespace qagg::nn
