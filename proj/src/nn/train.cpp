#include "qagg/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qagg/errors.hpp"

namespace qagg::nn {

int adaptive_batch_size(std::size_t n) {
    const long b = std::max<long>(32, static_cast<long>(n) / 32);
    return static_cast<int>(std::min<long>(256, b));
}

TrainResult train_until_stop(SgdProblem& problem, const TrainConfig& cfg) {
    const std::size_t n = problem.train_size();
    if (n == 0) throw std::invalid_argument("train_until_stop: empty training set");
    const int bs = cfg.batch_size > 0 ? cfg.batch_size : adaptive_batch_size(n);

    Rng shuffle_rng(Rng::derive(cfg.seed, 0));
    Rng dropout_rng(Rng::derive(cfg.seed, 1));

    AdamConfig adam;
    adam.lr = cfg.learning_rate;
    adam.weight_decay = cfg.weight_decay;
    AdamState state = AdamState::like(problem.params());

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_params = problem.params();
    long updates_at_best = 0;
    bool used_validation = false;

    TrainResult res;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t off = 0; off < n; off += static_cast<std::size_t>(bs)) {
            const std::size_t len = std::min<std::size_t>(bs, n - off);
            std::span<const std::size_t> batch(&order[off], len);
            Tape tape;
            std::vector<NodeId> param_ids;
            NodeId loss = problem.build_loss(tape, batch, dropout_rng, param_ids);
            const double lv = tape.val(loss)[0];
            if (!std::isfinite(lv)) {
                throw NumericalError("training aborted: non-finite loss at epoch " +
                                     std::to_string(epoch) + ", update " +
                                     std::to_string(res.updates + 1));
            }
            tape.backward(loss);
            std::vector<std::vector<double>> grads;
            grads.reserve(param_ids.size());
            for (NodeId id : param_ids) {
                auto g = tape.grad(id);
                grads.emplace_back(g.begin(), g.end());
            }
            adam_step(problem.params(), grads, state, adam);
            ++res.updates;
        }
        res.epochs_run = epoch;

        const double metric = problem.validation_metric();
        if (std::isnan(metric)) continue;
        used_validation = true;
        if (metric < best) {
            best = metric;
            best_params = problem.params();
            updates_at_best = res.updates;
        } else if (res.updates - updates_at_best >= cfg.early_stop_patience_updates) {
            break;
        }
    }
    if (used_validation) {
        problem.params() = best_params;
        res.best_metric = best;
    }
    return res;
}

} // namespace qagg::nn
