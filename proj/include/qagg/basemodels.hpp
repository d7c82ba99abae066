#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qagg/grid.hpp"
#include "qagg/matrix.hpp"
#include "qagg/nn/mlp.hpp"
#include "qagg/nn/train.hpp"

namespace qagg::models {

// Hidden layout for the network-backed models; the input and output widths
// come from the data and the grid at fit time.
struct NetShape {
    std::vector<int> hidden{64};
    double dropout = 0.0;
};

struct NoncrossConfig {
    double lambda = 1.0;
    // Constant margin applied to every level pair, unless a full table is given.
    double delta = 0.0;
    std::optional<std::vector<double>> margins_flat; // m x m row-major
};

// Common interface of the base quantile regressors. fit() is single-owner;
// a fitted model predicts concurrently.
class QuantileModel {
public:
    virtual ~QuantileModel() = default;
    // Validation split may be empty; network models then train to max_epochs.
    virtual void fit(const Matrix& X, std::span<const double> y,
                     const Matrix& X_val, std::span<const double> y_val) = 0;
    virtual std::vector<double> predict_row(std::span<const double> x) const = 0;
    virtual const QuantileGrid& grid() const = 0;
    virtual std::string name() const = 0;
    virtual nlohmann::json checkpoint() const = 0;

    // n x m predictions, one row per sample.
    Matrix predict_matrix(const Matrix& X) const;
    // Mean canonical WIS over a dataset.
    double mean_wis(const Matrix& X, std::span<const double> y) const;
};

struct LinearPinballConfig {
    nn::TrainConfig train;
};

struct CondGaussianConfig {
    bool mlp_mean = false;       // false: linear mean
    NetShape net;                // used when mlp_mean
    bool linear_log_sigma = false; // false: constant log sigma
    nn::TrainConfig train;
};

struct KnnConfig {
    int k = 25;
};

struct DqrConfig {
    NetShape net;
    nn::TrainConfig train;
    NoncrossConfig noncross;
};

using BaseModelConfig =
    std::variant<LinearPinballConfig, CondGaussianConfig, KnnConfig, DqrConfig>;

struct BaseModelKind {
    std::string name;
    BaseModelConfig config;
};

std::unique_ptr<QuantileModel> make_model(const BaseModelKind& kind, const QuantileGrid& grid);

// Direct constructors mirroring make_model for each family.
std::unique_ptr<QuantileModel> fit_linear_pinball(const Matrix& X, std::span<const double> y,
                                                  const QuantileGrid& grid,
                                                  const LinearPinballConfig& cfg);
std::unique_ptr<QuantileModel> fit_conditional_gaussian(const Matrix& X, std::span<const double> y,
                                                        const QuantileGrid& grid,
                                                        const CondGaussianConfig& cfg);
std::unique_ptr<QuantileModel> fit_knn_quantile(const Matrix& X, std::span<const double> y,
                                                const QuantileGrid& grid, int k);
std::unique_ptr<QuantileModel> fit_dqr(const Matrix& X, std::span<const double> y,
                                       const QuantileGrid& grid, const DqrConfig& cfg);

// Constant-margin table helper: delta on every tau < tau' pair.
std::vector<double> constant_margins(std::size_t m, double delta);

} // namespace qagg::models
