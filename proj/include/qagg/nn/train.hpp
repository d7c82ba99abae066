#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qagg/nn/adam.hpp"
#include "qagg/nn/tape.hpp"

namespace qagg::nn {

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 1e-5;
    int batch_size = 0; // 0 -> adaptive in the dataset size
    int max_epochs = 200;
    int early_stop_patience_updates = 500;
    std::uint64_t seed = 1;
};

// min(256, max(32, n/32))
int adaptive_batch_size(std::size_t n);

// A minibatch-trainable objective. The problem owns its parameters and
// rebuilds the loss subgraph for each batch.
class SgdProblem {
public:
    virtual ~SgdProblem() = default;
    virtual std::size_t train_size() const = 0;
    virtual std::vector<std::vector<double>>& params() = 0;
    // Builds the scalar loss for the given batch rows; appends the tape ids
    // of every parameter (in params() order) to param_ids.
    virtual NodeId build_loss(Tape& tape, std::span<const std::size_t> batch,
                              Rng& dropout_rng, std::vector<NodeId>& param_ids) = 0;
    // Validation metric, lower is better. Return NaN to disable early
    // stopping (training then runs to max_epochs and keeps the last epoch).
    virtual double validation_metric() = 0;
};

struct TrainResult {
    int epochs_run = 0;
    long updates = 0;
    double best_metric = 0.0;
};

// Epoch loop with Adam, per-epoch validation, and early stopping once the
// configured number of updates passes without improvement. On return the
// problem's parameters are those of the best epoch.
TrainResult train_until_stop(SgdProblem& problem, const TrainConfig& cfg);

} // namespace qagg::nn
