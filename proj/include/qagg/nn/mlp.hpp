#pragma once

#include <cstdint>
#include <vector>

#include "qagg/nn/tape.hpp"
#include "qagg/rng.hpp"

namespace qagg::nn {

// Feed-forward architecture: input width, at least one hidden width, output
// width. ELU activations on hidden layers, linear output head, dropout after
// each hidden activation.
struct MlpSpec {
    std::vector<int> layer_sizes;
    double dropout = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
};

// Flat parameter set: weights[l] is (out x in) row-major, biases[l] is (out).
struct MlpParams {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    // Uniform fan-in initialization, U(-1/sqrt(d_in), 1/sqrt(d_in)).
    static MlpParams init(const MlpSpec& spec);

    std::vector<std::vector<double>> flatten() const;
    void unflatten(const std::vector<std::vector<double>>& flat);
};

struct MlpBinding {
    std::vector<NodeId> w_ids, b_ids;
};

MlpBinding bind_mlp(Tape& tape, const MlpParams& params);

// Builds the forward pass on the tape for a (B x input) node. Dropout masks
// are drawn from `dropout_rng` only when train_mode is set.
NodeId mlp_forward(Tape& tape, const MlpBinding& bind, const MlpSpec& spec, NodeId x,
                   bool train_mode, Rng* dropout_rng);

// Convenience: evaluate the network outside any tape.
std::vector<double> mlp_eval(const MlpParams& params, const MlpSpec& spec,
                             std::span<const double> X, std::size_t n_rows);

} // namespace qagg::nn
