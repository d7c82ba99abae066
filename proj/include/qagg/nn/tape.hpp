#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "qagg/isotonic.hpp"
#include "qagg/rng.hpp"

namespace qagg::nn {

using NodeId = std::size_t;

// Define-by-run reverse-mode tape over the small op set every model in this
// project needs: affine maps, ELU, grouped softmax, elementwise arithmetic,
// the pinball and Gaussian-NLL losses, the pairwise crossing penalty, and
// row-wise isotonization layers (differentiated through the operators'
// backward descriptors). Values are row-major (rows x cols) doubles.
//
// A Tape is built fresh for each minibatch, single-owner, not thread-safe;
// independent tapes run concurrently.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    NodeId input(std::vector<double> v, std::size_t rows, std::size_t cols);
    NodeId input_scalar(double v);
    // Parameters are copied in; gradients are read back after backward().
    NodeId param(std::span<const double> v, std::size_t rows, std::size_t cols);

    // y = x W^T + b. x: (B x d), W: (h x d), b: (h) or empty -> (B x h).
    NodeId linear(NodeId x, NodeId W, NodeId b);
    // y = x A^T with A (m x n), x (B x n) -> (B x m).
    NodeId matvec(NodeId A, NodeId x);
    NodeId elu(NodeId x);
    // Softmax over consecutive groups of `group` entries within each row;
    // group must divide the column count.
    NodeId softmax_groups(NodeId x, std::size_t group);
    NodeId add(NodeId a, NodeId b);
    // a + c * b
    NodeId add_scaled(NodeId a, NodeId b, double c);
    NodeId mul(NodeId a, NodeId b);
    NodeId scale(NodeId a, double c);
    // Inverted dropout; draws one mask from `rng` per entry.
    NodeId dropout(NodeId x, double rate, Rng& rng);

    // Elementwise max(x + shift, 0).
    NodeId positive_part(NodeId x, double shift = 0.0);

    // Replicates a (1 x k) row into (B x k); gradients sum over rows.
    NodeId broadcast_rows(NodeId x, std::size_t B);

    // Weighted combinations of base predictions. preds is a (B x p x m)
    // batch of constants, copied in. Global weights: coarse (1 x p),
    // medium (m x p), fine (m x p*m). Local weights carry one row per
    // sample: (B x p), (B x m*p), (B x m*p*m). Output is (B x m).
    NodeId combine_coarse(NodeId w, std::span<const double> preds,
                          std::size_t B, std::size_t p, std::size_t m);
    NodeId combine_medium(NodeId w, std::span<const double> preds,
                          std::size_t B, std::size_t p, std::size_t m);
    NodeId combine_fine(NodeId w, std::span<const double> preds,
                        std::size_t B, std::size_t p, std::size_t m);

    // Row-wise isotonization layer.
    NodeId isotonize(NodeId x, IsoOperator op, std::size_t median_anchor);

    // Mean over rows of the summed pinball loss across levels.
    NodeId pinball_sum_loss(NodeId pred, std::vector<double> y, std::vector<double> levels);
    // Mean over rows of sum_{i<j} (pred_i - pred_j + delta_ij)_+ with
    // margins as a flat row-major m x m table (upper triangle used).
    NodeId crossing_penalty(NodeId pred, std::vector<double> margins_flat);
    // Mean Gaussian negative log-likelihood; mu and log_sigma are (B x 1).
    NodeId gaussian_nll(NodeId mu, NodeId log_sigma, std::vector<double> y);
    // Mean squared error over all entries.
    NodeId mse_loss(NodeId pred, std::vector<double> y);

    void backward(NodeId loss);

    std::span<const double> val(NodeId id) const { return nodes_[id].val; }
    std::span<const double> grad(NodeId id) const { return nodes_[id].grad; }
    std::size_t rows(NodeId id) const { return nodes_[id].rows; }
    std::size_t cols(NodeId id) const { return nodes_[id].cols; }

private:
    struct Node {
        std::vector<double> val;
        std::vector<double> grad;
        std::size_t rows = 0, cols = 0;
        std::function<void(Tape&)> backward;
    };

    NodeId make(std::size_t rows, std::size_t cols);
    // Deque: appending must not invalidate references held by op builders.
    std::deque<Node> nodes_;
};

} // namespace qagg::nn
