#include "qagg/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace qagg::nn {

NodeId Tape::make(std::size_t rows, std::size_t cols) {
    Node n;
    n.rows = rows;
    n.cols = cols;
    n.val.assign(rows * cols, 0.0);
    n.grad.assign(rows * cols, 0.0);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
}

NodeId Tape::input(std::vector<double> v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("Tape::input: shape mismatch");
    NodeId id = make(rows, cols);
    nodes_[id].val = std::move(v);
    return id;
}

NodeId Tape::input_scalar(double v) { return input({v}, 1, 1); }

NodeId Tape::param(std::span<const double> v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("Tape::param: shape mismatch");
    NodeId id = make(rows, cols);
    nodes_[id].val.assign(v.begin(), v.end());
    return id;
}

NodeId Tape::linear(NodeId x, NodeId W, NodeId b) {
    const auto& xn = nodes_[x];
    const auto& wn = nodes_[W];
    const std::size_t B = xn.rows, d = xn.cols, h = wn.rows;
    if (wn.cols != d) throw std::invalid_argument("Tape::linear: W/x shape mismatch");
    const bool has_bias = nodes_[b].val.size() > 0;
    if (has_bias && nodes_[b].val.size() != h) throw std::invalid_argument("Tape::linear: bias shape");
    NodeId out = make(B, h);
    auto& on = nodes_[out];
    for (std::size_t r = 0; r < B; ++r) {
        const double* xr = &xn.val[r * d];
        double* orow = &on.val[r * h];
        for (std::size_t i = 0; i < h; ++i) {
            const double* wr = &wn.val[i * d];
            double s = has_bias ? nodes_[b].val[i] : 0.0;
            for (std::size_t k = 0; k < d; ++k) s += wr[k] * xr[k];
            orow[i] = s;
        }
    }
    nodes_[out].backward = [x, W, b, out, B, d, h, has_bias](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        const auto& xv = t.nodes_[x].val;
        const auto& wv = t.nodes_[W].val;
        auto& gx = t.nodes_[x].grad;
        auto& gw = t.nodes_[W].grad;
        auto& gb = t.nodes_[b].grad;
        for (std::size_t r = 0; r < B; ++r) {
            const double* gor = &go[r * h];
            const double* xr = &xv[r * d];
            double* gxr = &gx[r * d];
            for (std::size_t i = 0; i < h; ++i) {
                const double g = gor[i];
                if (g == 0.0) continue;
                const double* wr = &wv[i * d];
                double* gwr = &gw[i * d];
                for (std::size_t k = 0; k < d; ++k) {
                    gxr[k] += g * wr[k];
                    gwr[k] += g * xr[k];
                }
                if (has_bias) gb[i] += g;
            }
        }
    };
    return out;
}

NodeId Tape::matvec(NodeId A, NodeId x) {
    NodeId none = input({}, 0, 0);
    return linear(x, A, none);
}

NodeId Tape::elu(NodeId x) {
    const auto& xn = nodes_[x];
    NodeId out = make(xn.rows, xn.cols);
    auto& on = nodes_[out];
    for (std::size_t i = 0; i < xn.val.size(); ++i) {
        const double v = xn.val[i];
        on.val[i] = v > 0.0 ? v : std::expm1(v);
    }
    nodes_[out].backward = [x, out](Tape& t) {
        const auto& xv = t.nodes_[x].val;
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t i = 0; i < xv.size(); ++i) {
            gx[i] += go[i] * (xv[i] > 0.0 ? 1.0 : std::exp(xv[i]));
        }
    };
    return out;
}

NodeId Tape::softmax_groups(NodeId x, std::size_t group) {
    const auto& xn = nodes_[x];
    if (group == 0 || xn.cols % group != 0) {
        throw std::invalid_argument("Tape::softmax_groups: group must divide columns");
    }
    NodeId out = make(xn.rows, xn.cols);
    auto& on = nodes_[out];
    const std::size_t total = xn.val.size();
    for (std::size_t g0 = 0; g0 < total; g0 += group) {
        double mx = xn.val[g0];
        for (std::size_t i = 1; i < group; ++i) mx = std::max(mx, xn.val[g0 + i]);
        double z = 0.0;
        for (std::size_t i = 0; i < group; ++i) {
            on.val[g0 + i] = std::exp(xn.val[g0 + i] - mx);
            z += on.val[g0 + i];
        }
        for (std::size_t i = 0; i < group; ++i) on.val[g0 + i] /= z;
    }
    nodes_[out].backward = [x, out, group, total](Tape& t) {
        const auto& s = t.nodes_[out].val;
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t g0 = 0; g0 < total; g0 += group) {
            double dot = 0.0;
            for (std::size_t i = 0; i < group; ++i) dot += go[g0 + i] * s[g0 + i];
            for (std::size_t i = 0; i < group; ++i) {
                gx[g0 + i] += s[g0 + i] * (go[g0 + i] - dot);
            }
        }
    };
    return out;
}

NodeId Tape::add(NodeId a, NodeId b) { return add_scaled(a, b, 1.0); }

NodeId Tape::add_scaled(NodeId a, NodeId b, double c) {
    const auto& an = nodes_[a];
    const auto& bn = nodes_[b];
    if (an.val.size() != bn.val.size()) throw std::invalid_argument("Tape::add: shape mismatch");
    NodeId out = make(an.rows, an.cols);
    auto& on = nodes_[out];
    for (std::size_t i = 0; i < an.val.size(); ++i) on.val[i] = an.val[i] + c * bn.val[i];
    nodes_[out].backward = [a, b, out, c](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& ga = t.nodes_[a].grad;
        auto& gb = t.nodes_[b].grad;
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i];
            gb[i] += c * go[i];
        }
    };
    return out;
}

NodeId Tape::mul(NodeId a, NodeId b) {
    const auto& an = nodes_[a];
    const auto& bn = nodes_[b];
    if (an.val.size() != bn.val.size()) throw std::invalid_argument("Tape::mul: shape mismatch");
    NodeId out = make(an.rows, an.cols);
    auto& on = nodes_[out];
    for (std::size_t i = 0; i < an.val.size(); ++i) on.val[i] = an.val[i] * bn.val[i];
    nodes_[out].backward = [a, b, out](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        const auto& av = t.nodes_[a].val;
        const auto& bv = t.nodes_[b].val;
        auto& ga = t.nodes_[a].grad;
        auto& gb = t.nodes_[b].grad;
        for (std::size_t i = 0; i < go.size(); ++i) {
            ga[i] += go[i] * bv[i];
            gb[i] += go[i] * av[i];
        }
    };
    return out;
}

NodeId Tape::scale(NodeId a, double c) {
    const auto& an = nodes_[a];
    NodeId out = make(an.rows, an.cols);
    for (std::size_t i = 0; i < an.val.size(); ++i) nodes_[out].val[i] = c * an.val[i];
    nodes_[out].backward = [a, out, c](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& ga = t.nodes_[a].grad;
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += c * go[i];
    };
    return out;
}

NodeId Tape::dropout(NodeId x, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("Tape::dropout: rate must be in [0,1)");
    const auto& xn = nodes_[x];
    NodeId out = make(xn.rows, xn.cols);
    auto mask = std::make_shared<std::vector<double>>(xn.val.size());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < xn.val.size(); ++i) {
        (*mask)[i] = rng.uniform() >= rate ? keep_scale : 0.0;
        nodes_[out].val[i] = xn.val[i] * (*mask)[i];
    }
    nodes_[out].backward = [x, out, mask](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i] * (*mask)[i];
    };
    return out;
}

NodeId Tape::positive_part(NodeId x, double shift) {
    const auto& xn = nodes_[x];
    NodeId out = make(xn.rows, xn.cols);
    for (std::size_t i = 0; i < xn.val.size(); ++i) {
        nodes_[out].val[i] = std::max(xn.val[i] + shift, 0.0);
    }
    nodes_[out].backward = [x, out, shift](Tape& t) {
        const auto& xv = t.nodes_[x].val;
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t i = 0; i < go.size(); ++i) {
            if (xv[i] + shift > 0.0) gx[i] += go[i];
        }
    };
    return out;
}

NodeId Tape::broadcast_rows(NodeId x, std::size_t B) {
    const std::size_t k = nodes_[x].cols;
    if (nodes_[x].rows != 1) throw std::invalid_argument("Tape::broadcast_rows: expects one row");
    NodeId out = make(B, k);
    for (std::size_t r = 0; r < B; ++r) {
        for (std::size_t i = 0; i < k; ++i) nodes_[out].val[r * k + i] = nodes_[x].val[i];
    }
    nodes_[out].backward = [x, out, B, k](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t r = 0; r < B; ++r) {
            for (std::size_t i = 0; i < k; ++i) gx[i] += go[r * k + i];
        }
    };
    return out;
}

NodeId Tape::combine_coarse(NodeId w, std::span<const double> preds,
                            std::size_t B, std::size_t p, std::size_t m) {
    const auto& wn = nodes_[w];
    if (!(wn.cols == p && (wn.rows == 1 || wn.rows == B))) {
        throw std::invalid_argument("Tape::combine_coarse: weight shape");
    }
    if (preds.size() != B * p * m) throw std::invalid_argument("Tape::combine_coarse: preds shape");
    auto cube = std::make_shared<std::vector<double>>(preds.begin(), preds.end());
    NodeId out = make(B, m);
    auto& on = nodes_[out];
    for (std::size_t b = 0; b < B; ++b) {
        const double* wrow = &wn.val[(wn.rows == 1 ? 0 : b) * p];
        for (std::size_t j = 0; j < p; ++j) {
            const double* pj = &(*cube)[(b * p + j) * m];
            for (std::size_t t = 0; t < m; ++t) on.val[b * m + t] += wrow[j] * pj[t];
        }
    }
    nodes_[out].backward = [w, out, cube, B, p, m](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gw = t.nodes_[w].grad;
        const bool global = t.nodes_[w].rows == 1;
        for (std::size_t b = 0; b < B; ++b) {
            double* gwr = &gw[(global ? 0 : b) * p];
            for (std::size_t j = 0; j < p; ++j) {
                const double* pj = &(*cube)[(b * p + j) * m];
                double s = 0.0;
                for (std::size_t k = 0; k < m; ++k) s += go[b * m + k] * pj[k];
                gwr[j] += s;
            }
        }
    };
    return out;
}

NodeId Tape::combine_medium(NodeId w, std::span<const double> preds,
                            std::size_t B, std::size_t p, std::size_t m) {
    const auto& wn = nodes_[w];
    const bool global = (wn.rows == m && wn.cols == p);
    const bool local = (wn.rows == B && wn.cols == m * p);
    if (!global && !local) throw std::invalid_argument("Tape::combine_medium: weight shape");
    if (preds.size() != B * p * m) throw std::invalid_argument("Tape::combine_medium: preds shape");
    auto cube = std::make_shared<std::vector<double>>(preds.begin(), preds.end());
    NodeId out = make(B, m);
    auto& on = nodes_[out];
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t t = 0; t < m; ++t) {
            const double* wrow = global ? &wn.val[t * p] : &wn.val[b * m * p + t * p];
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += wrow[j] * (*cube)[(b * p + j) * m + t];
            on.val[b * m + t] = s;
        }
    }
    nodes_[out].backward = [w, out, cube, B, p, m, global](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gw = t.nodes_[w].grad;
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t k = 0; k < m; ++k) {
                const double g = go[b * m + k];
                if (g == 0.0) continue;
                double* gwr = global ? &gw[k * p] : &gw[b * m * p + k * p];
                for (std::size_t j = 0; j < p; ++j) {
                    gwr[j] += g * (*cube)[(b * p + j) * m + k];
                }
            }
        }
    };
    return out;
}

NodeId Tape::combine_fine(NodeId w, std::span<const double> preds,
                          std::size_t B, std::size_t p, std::size_t m) {
    const auto& wn = nodes_[w];
    const std::size_t pm = p * m;
    const bool global = (wn.rows == m && wn.cols == pm);
    const bool local = (wn.rows == B && wn.cols == m * pm);
    if (!global && !local) throw std::invalid_argument("Tape::combine_fine: weight shape");
    if (preds.size() != B * p * m) throw std::invalid_argument("Tape::combine_fine: preds shape");
    auto cube = std::make_shared<std::vector<double>>(preds.begin(), preds.end());
    NodeId out = make(B, m);
    auto& on = nodes_[out];
    for (std::size_t b = 0; b < B; ++b) {
        const double* cb = &(*cube)[b * pm]; // (j,v) flattened: j*m + v
        for (std::size_t t = 0; t < m; ++t) {
            const double* wrow = global ? &wn.val[t * pm] : &wn.val[b * m * pm + t * pm];
            double s = 0.0;
            for (std::size_t jv = 0; jv < pm; ++jv) s += wrow[jv] * cb[jv];
            on.val[b * m + t] = s;
        }
    }
    nodes_[out].backward = [w, out, cube, B, m, pm, global](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gw = t.nodes_[w].grad;
        for (std::size_t b = 0; b < B; ++b) {
            const double* cb = &(*cube)[b * pm];
            for (std::size_t k = 0; k < m; ++k) {
                const double g = go[b * m + k];
                if (g == 0.0) continue;
                double* gwr = global ? &gw[k * pm] : &gw[b * m * pm + k * pm];
                for (std::size_t jv = 0; jv < pm; ++jv) gwr[jv] += g * cb[jv];
            }
        }
    };
    return out;
}

NodeId Tape::isotonize(NodeId x, IsoOperator op, std::size_t median_anchor) {
    const auto& xn = nodes_[x];
    const std::size_t B = xn.rows, m = xn.cols;
    NodeId out = make(B, m);
    auto results = std::make_shared<std::vector<IsotonicResult>>();
    results->reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        std::span<const double> row(&xn.val[b * m], m);
        results->push_back(apply_isotonic(op, row, median_anchor));
        for (std::size_t i = 0; i < m; ++i) nodes_[out].val[b * m + i] = (*results)[b].values[i];
    }
    nodes_[out].backward = [x, out, results, B, m](Tape& t) {
        const auto& go = t.nodes_[out].grad;
        auto& gx = t.nodes_[x].grad;
        for (std::size_t b = 0; b < B; ++b) {
            (*results)[b].vjp(std::span<const double>(&go[b * m], m),
                              std::span<double>(&gx[b * m], m));
        }
    };
    return out;
}

NodeId Tape::pinball_sum_loss(NodeId pred, std::vector<double> y, std::vector<double> levels) {
    const auto& pn = nodes_[pred];
    const std::size_t B = pn.rows, m = pn.cols;
    if (y.size() != B || levels.size() != m) {
        throw std::invalid_argument("Tape::pinball_sum_loss: shape mismatch");
    }
    NodeId out = make(1, 1);
    auto ys = std::make_shared<std::vector<double>>(std::move(y));
    auto lv = std::make_shared<std::vector<double>>(std::move(levels));
    double total = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < m; ++i) {
            const double r = (*ys)[b] - pn.val[b * m + i];
            total += r >= 0.0 ? (*lv)[i] * r : ((*lv)[i] - 1.0) * r;
        }
    }
    nodes_[out].val[0] = total / static_cast<double>(B);
    nodes_[out].backward = [pred, out, ys, lv, B, m](Tape& t) {
        const double g = t.nodes_[out].grad[0] / static_cast<double>(B);
        const auto& pv = t.nodes_[pred].val;
        auto& gp = t.nodes_[pred].grad;
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t i = 0; i < m; ++i) {
                const double tau = (*lv)[i];
                // Subgradient of psi_tau(y - q) in q; ties take the y >= q branch.
                gp[b * m + i] += g * ((*ys)[b] >= pv[b * m + i] ? -tau : (1.0 - tau));
            }
        }
    };
    return out;
}

NodeId Tape::crossing_penalty(NodeId pred, std::vector<double> margins_flat) {
    const auto& pn = nodes_[pred];
    const std::size_t B = pn.rows, m = pn.cols;
    if (margins_flat.size() != m * m) {
        throw std::invalid_argument("Tape::crossing_penalty: margin table must be m x m");
    }
    NodeId out = make(1, 1);
    auto delta = std::make_shared<std::vector<double>>(std::move(margins_flat));
    double total = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        const double* row = &pn.val[b * m];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double v = row[i] - row[j] + (*delta)[i * m + j];
                if (v > 0.0) total += v;
            }
        }
    }
    nodes_[out].val[0] = total / static_cast<double>(B);
    nodes_[out].backward = [pred, out, delta, B, m](Tape& t) {
        const double g = t.nodes_[out].grad[0] / static_cast<double>(B);
        const auto& pv = t.nodes_[pred].val;
        auto& gp = t.nodes_[pred].grad;
        for (std::size_t b = 0; b < B; ++b) {
            const double* row = &pv[b * m];
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j) {
                    if (row[i] - row[j] + (*delta)[i * m + j] > 0.0) {
                        gp[b * m + i] += g;
                        gp[b * m + j] -= g;
                    }
                }
            }
        }
    };
    return out;
}

NodeId Tape::gaussian_nll(NodeId mu, NodeId log_sigma, std::vector<double> y) {
    const auto& mn = nodes_[mu];
    const auto& sn = nodes_[log_sigma];
    const std::size_t B = mn.rows;
    if (mn.val.size() != B || sn.val.size() != B || y.size() != B) {
        throw std::invalid_argument("Tape::gaussian_nll: shape mismatch");
    }
    NodeId out = make(1, 1);
    auto ys = std::make_shared<std::vector<double>>(std::move(y));
    constexpr double half_log_2pi = 0.9189385332046727;
    double total = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        const double s2 = std::exp(2.0 * sn.val[b]);
        const double r = (*ys)[b] - mn.val[b];
        total += half_log_2pi + sn.val[b] + 0.5 * r * r / s2;
    }
    nodes_[out].val[0] = total / static_cast<double>(B);
    nodes_[out].backward = [mu, log_sigma, out, ys, B](Tape& t) {
        const double g = t.nodes_[out].grad[0] / static_cast<double>(B);
        const auto& mv = t.nodes_[mu].val;
        const auto& sv = t.nodes_[log_sigma].val;
        auto& gm = t.nodes_[mu].grad;
        auto& gs = t.nodes_[log_sigma].grad;
        for (std::size_t b = 0; b < B; ++b) {
            const double s2 = std::exp(2.0 * sv[b]);
            const double r = (*ys)[b] - mv[b];
            gm[b] += g * (-r / s2);
            gs[b] += g * (1.0 - r * r / s2);
        }
    };
    return out;
}

NodeId Tape::mse_loss(NodeId pred, std::vector<double> y) {
    const auto& pn = nodes_[pred];
    if (pn.val.size() != y.size()) throw std::invalid_argument("Tape::mse_loss: shape mismatch");
    NodeId out = make(1, 1);
    auto ys = std::make_shared<std::vector<double>>(std::move(y));
    const std::size_t n = pn.val.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pn.val[i] - (*ys)[i];
        total += r * r;
    }
    nodes_[out].val[0] = total / static_cast<double>(n);
    nodes_[out].backward = [pred, out, ys, n](Tape& t) {
        const double g = t.nodes_[out].grad[0] / static_cast<double>(n);
        const auto& pv = t.nodes_[pred].val;
        auto& gp = t.nodes_[pred].grad;
        for (std::size_t i = 0; i < n; ++i) gp[i] += g * 2.0 * (pv[i] - (*ys)[i]);
    };
    return out;
}

void Tape::backward(NodeId loss) {
    if (nodes_[loss].val.size() != 1) {
        throw std::invalid_argument("Tape::backward: loss must be scalar");
    }
    nodes_[loss].grad[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].backward) nodes_[i].backward(*this);
    }
}

} // namespace qagg::nn
