#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/rng.hpp"

namespace igsm::nn {
using igsm::hash_combine;
using igsm::Rng;

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A named parameter tensor with its gradient and optimizer state.
template <class T>
struct Param {
    std::string name;
    Mat<T> value;
    Mat<T> grad;
    Mat<T> adam_m;
    Mat<T> adam_v;

    void init_state() {
        grad = Mat<T>::Zero(value.rows(), value.cols());
        adam_m = Mat<T>::Zero(value.rows(), value.cols());
        adam_v = Mat<T>::Zero(value.rows(), value.cols());
    }
};

// Reverse-mode tape. Nodes are created in topological order, so running the
// recorded backward closures in reverse creation order visits each node
// exactly once.
template <class T>
class Tape {
public:
    using Id = int;

    Id constant(Mat<T> v) { return push(std::move(v), false); }

    // Leaf tied to an external parameter: after backward() the node gradient
    // is accumulated into p.grad.
    Id param(Param<T>& p) {
        Id id = push(p.value, true);
        param_sinks_.push_back({id, &p});
        return id;
    }

    const Mat<T>& value(Id id) const { return nodes_[id].value; }
    const Mat<T>& grad(Id id) const { return nodes_[id].grad; }
    bool needs_grad(Id id) const { return nodes_[id].needs_grad; }

    Id matmul(Id a, Id b) {
        const Mat<T>&A = value(a), &B = value(b);
        if (A.cols() != B.rows()) throw ShapeMismatch("matmul: inner dimensions differ");
        Id out = push(A * B, needs_grad(a) || needs_grad(b));
        record(out, [this, a, b, out] {
            const Mat<T>& g = nodes_[out].grad;
            if (needs_grad(a)) nodes_[a].grad.noalias() += g * value(b).transpose();
            if (needs_grad(b)) nodes_[b].grad.noalias() += value(a).transpose() * g;
        });
        return out;
    }

    // Elementwise add; b may also be a 1 x n row broadcast over a's rows.
    Id add(Id a, Id b) {
        const Mat<T>&A = value(a), &B = value(b);
        const bool broadcast = B.rows() == 1 && A.rows() != 1;
        if (A.cols() != B.cols() || (!broadcast && A.rows() != B.rows()))
            throw ShapeMismatch("add: incompatible shapes");
        Mat<T> out_v = broadcast ? Mat<T>(A.rowwise() + B.row(0)) : Mat<T>(A + B);
        Id out = push(std::move(out_v), needs_grad(a) || needs_grad(b));
        record(out, [this, a, b, out, broadcast] {
            const Mat<T>& g = nodes_[out].grad;
            if (needs_grad(a)) nodes_[a].grad += g;
            if (needs_grad(b)) {
                if (broadcast)
                    nodes_[b].grad.row(0) += g.colwise().sum();
                else
                    nodes_[b].grad += g;
            }
        });
        return out;
    }

    Id scale(Id a, T s) {
        Id out = push(value(a) * s, needs_grad(a));
        record(out, [this, a, out, s] {
            if (needs_grad(a)) nodes_[a].grad += nodes_[out].grad * s;
        });
        return out;
    }

    // Row-wise softmax, stabilized by max subtraction.
    Id softmax(Id a) {
        Mat<T> p = value(a);
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            p.row(r) = (p.row(r).array() - p.row(r).maxCoeff()).exp();
            p.row(r) /= p.row(r).sum();
        }
        Id out = push(std::move(p), needs_grad(a));
        record(out, [this, a, out] {
            if (!needs_grad(a)) return;
            const Mat<T>&P = nodes_[out].value, &g = nodes_[out].grad;
            for (Eigen::Index r = 0; r < P.rows(); ++r) {
                T dot = g.row(r).cwiseProduct(P.row(r)).sum();
                nodes_[a].grad.row(r).array() += P.row(r).array() * (g.row(r).array() - dot);
            }
        });
        return out;
    }

    Id layer_norm(Id x, Id gamma, Id beta, T eps = static_cast<T>(1e-5)) {
        const Mat<T>& X = value(x);
        if (value(gamma).rows() != 1 || value(gamma).cols() != X.cols() ||
            value(beta).rows() != 1 || value(beta).cols() != X.cols())
            throw ShapeMismatch("layer_norm: gamma/beta must be 1 x d");
        Mat<T> xhat(X.rows(), X.cols());
        Mat<T> inv_std(X.rows(), 1);
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            T mean = X.row(r).mean();
            auto centered = (X.row(r).array() - mean).eval();
            T var = centered.square().mean();
            inv_std(r, 0) = T(1) / std::sqrt(var + eps);
            xhat.row(r) = centered * inv_std(r, 0);
        }
        Mat<T> out_v = (xhat.array().rowwise() * value(gamma).row(0).array()).rowwise() +
                       value(beta).row(0).array();
        Id out = push(out_v.matrix(),
                      needs_grad(x) || needs_grad(gamma) || needs_grad(beta));
        record(out, [this, x, gamma, beta, out, xhat = std::move(xhat),
                     inv_std = std::move(inv_std)] {
            const Mat<T>& g = nodes_[out].grad;
            if (needs_grad(gamma))
                nodes_[gamma].grad.row(0) += g.cwiseProduct(xhat).colwise().sum();
            if (needs_grad(beta)) nodes_[beta].grad.row(0) += g.colwise().sum();
            if (!needs_grad(x)) return;
            const auto gam = value(gamma).row(0).array();
            const T d = static_cast<T>(xhat.cols());
            for (Eigen::Index r = 0; r < g.rows(); ++r) {
                auto gy = (g.row(r).array() * gam).eval();
                T sum_gy = gy.sum();
                T sum_gy_xhat = (gy * xhat.row(r).array()).sum();
                nodes_[x].grad.row(r).array() +=
                    inv_std(r, 0) *
                    (gy - sum_gy / d - xhat.row(r).array() * (sum_gy_xhat / d));
            }
        });
        return out;
    }

    // Exact GELU: x * Phi(x).
    Id gelu(Id a) {
        const Mat<T>& X = value(a);
        static const T inv_sqrt2 = static_cast<T>(0.7071067811865475);
        static const T inv_sqrt2pi = static_cast<T>(0.3989422804014327);
        Mat<T> out_v =
            X.array().unaryExpr([](T v) {
                return static_cast<T>(0.5) * v *
                       (T(1) + std::erf(v * inv_sqrt2));
            });
        Id out = push(out_v, needs_grad(a));
        record(out, [this, a, out] {
            if (!needs_grad(a)) return;
            const Mat<T>& X = nodes_[a].value;
            nodes_[a].grad.array() +=
                nodes_[out].grad.array() * X.array().unaryExpr([](T v) {
                    T phi = inv_sqrt2pi * std::exp(static_cast<T>(-0.5) * v * v);
                    T Phi = static_cast<T>(0.5) * (T(1) + std::erf(v * inv_sqrt2));
                    return Phi + v * phi;
                });
        });
        return out;
    }

    // Gathers rows of `table` (plus nothing else); backward scatter-adds.
    Id embedding_lookup(Id table, const std::vector<int>& ids) {
        const Mat<T>& W = value(table);
        Mat<T> out_v(static_cast<Eigen::Index>(ids.size()), W.cols());
        for (size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] < 0 || ids[i] >= W.rows())
                throw ShapeMismatch("embedding_lookup: id out of range");
            out_v.row(static_cast<Eigen::Index>(i)) = W.row(ids[i]);
        }
        Id out = push(std::move(out_v), needs_grad(table));
        record(out, [this, table, out, ids] {
            if (!needs_grad(table)) return;
            for (size_t i = 0; i < ids.size(); ++i)
                nodes_[table].grad.row(ids[i]) +=
                    nodes_[out].grad.row(static_cast<Eigen::Index>(i));
        });
        return out;
    }

    // Fused multi-head causal self-attention over packed qkv (T x 3d).
    Id causal_self_attention(Id qkv, int n_heads) {
        const Mat<T>& X = value(qkv);
        const Eigen::Index t = X.rows();
        if (X.cols() % (3 * n_heads) != 0)
            throw ShapeMismatch("attention: qkv width not divisible by 3*heads");
        const Eigen::Index d = X.cols() / 3;
        const Eigen::Index dh = d / n_heads;
        const T inv_sqrt_dh = T(1) / std::sqrt(static_cast<T>(dh));

        Mat<T> out_v = Mat<T>::Zero(t, d);
        auto probs = std::make_shared<std::vector<Mat<T>>>();
        probs->reserve(n_heads);
        for (int h = 0; h < n_heads; ++h) {
            auto Q = X.middleCols(h * dh, dh);
            auto K = X.middleCols(d + h * dh, dh);
            auto V = X.middleCols(2 * d + h * dh, dh);
            Mat<T> scores = Q * K.transpose() * inv_sqrt_dh;
            Mat<T> P = Mat<T>::Zero(t, t);
            for (Eigen::Index r = 0; r < t; ++r) {
                auto row = scores.row(r).head(r + 1);
                Eigen::Array<T, 1, Eigen::Dynamic> e =
                    (row.array() - row.maxCoeff()).exp();
                P.row(r).head(r + 1) = e / e.sum();
            }
            out_v.middleCols(h * dh, dh).noalias() = P * V;
            probs->push_back(std::move(P));
        }
        Id out = push(std::move(out_v), needs_grad(qkv));
        record(out, [this, qkv, out, n_heads, d, dh, inv_sqrt_dh, probs] {
            if (!needs_grad(qkv)) return;
            const Mat<T>& X = nodes_[qkv].value;
            Mat<T>& gX = nodes_[qkv].grad;
            const Mat<T>& gO = nodes_[out].grad;
            for (int h = 0; h < n_heads; ++h) {
                auto Q = X.middleCols(h * dh, dh);
                auto K = X.middleCols(d + h * dh, dh);
                auto V = X.middleCols(2 * d + h * dh, dh);
                const Mat<T>& P = (*probs)[h];
                auto gOh = gO.middleCols(h * dh, dh);
                Mat<T> gV = P.transpose() * gOh;
                Mat<T> gP = gOh * V.transpose();
                // softmax backward per row (mask is implicit: P is zero there)
                Mat<T> gS(P.rows(), P.cols());
                for (Eigen::Index r = 0; r < P.rows(); ++r) {
                    T dot = gP.row(r).cwiseProduct(P.row(r)).sum();
                    gS.row(r).array() = P.row(r).array() * (gP.row(r).array() - dot);
                }
                gX.middleCols(h * dh, dh).noalias() += gS * K * inv_sqrt_dh;
                gX.middleCols(d + h * dh, dh).noalias() +=
                    gS.transpose() * Q * inv_sqrt_dh;
                gX.middleCols(2 * d + h * dh, dh).noalias() += gV;
            }
        });
        return out;
    }

    // (sum_t mask_t * w_t * nll_t) / (sum_t mask_t); unit weights give the
    // length-normalized NLL over unmasked tokens.
    Id cross_entropy_from_logits(Id logits, const std::vector<int>& targets,
                                 const std::vector<int>& mask,
                                 const std::vector<T>& weights) {
        const Mat<T>& L = value(logits);
        const size_t t = targets.size();
        if (static_cast<size_t>(L.rows()) != t || mask.size() != t || weights.size() != t)
            throw ShapeMismatch("cross_entropy: row/target/mask/weight lengths differ");
        if (!L.allFinite()) throw NonFiniteInput("cross_entropy: non-finite logits");
        auto probs = std::make_shared<Mat<T>>(L.rows(), L.cols());
        T denom = 0;
        for (int m : mask) denom += static_cast<T>(m);
        T loss = 0;
        for (size_t r = 0; r < t; ++r) {
            auto row = L.row(static_cast<Eigen::Index>(r));
            T mx = row.maxCoeff();
            Eigen::Array<T, 1, Eigen::Dynamic> e = (row.array() - mx).exp();
            T z = e.sum();
            probs->row(static_cast<Eigen::Index>(r)) = e / z;
            if (mask[r]) {
                T logp = row(targets[r]) - mx - std::log(z);
                loss -= weights[r] * logp;
            }
        }
        Mat<T> out_v(1, 1);
        out_v(0, 0) = denom > 0 ? loss / denom : T(0);
        Id out = push(std::move(out_v), needs_grad(logits));
        record(out, [this, logits, out, targets, mask, weights, probs, denom] {
            if (!needs_grad(logits) || denom == T(0)) return;
            const T g = nodes_[out].grad(0, 0) / denom;
            Mat<T>& gL = nodes_[logits].grad;
            for (size_t r = 0; r < targets.size(); ++r) {
                if (!mask[r]) continue;
                auto row = gL.row(static_cast<Eigen::Index>(r));
                row += probs->row(static_cast<Eigen::Index>(r)) * (g * weights[r]);
                row(targets[r]) -= g * weights[r];
            }
        });
        return out;
    }

    // Reverse accumulation from a scalar node; parameter gradients are added
    // into their Param::grad buffers.
    void backward(Id loss) {
        if (value(loss).rows() != 1 || value(loss).cols() != 1)
            throw ShapeMismatch("backward: loss must be scalar");
        for (auto& n : nodes_) n.grad = Mat<T>::Zero(n.value.rows(), n.value.cols());
        nodes_[loss].grad(0, 0) = T(1);
        for (Id id = loss; id >= 0; --id)
            if (nodes_[id].backward) nodes_[id].backward();
        for (auto& [id, p] : param_sinks_) p->grad += nodes_[id].grad;
    }

private:
    struct Node {
        Mat<T> value;
        Mat<T> grad;
        bool needs_grad = false;
        std::function<void()> backward;
    };

    Id push(Mat<T> v, bool needs) {
        nodes_.push_back(Node{std::move(v), {}, needs, nullptr});
        return static_cast<Id>(nodes_.size() - 1);
    }
    void record(Id id, std::function<void()> fn) { nodes_[id].backward = std::move(fn); }

    std::vector<Node> nodes_;
    std::vector<std::pair<Id, Param<T>*>> param_sinks_;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    size_t checked = 0;
    bool pass = false;
};

// Central finite differences against the analytic gradients. `loss_fn(true)`
// must run forward + backward, accumulating into each Param::grad;
// `loss_fn(false)` is forward-only. Double precision only.
inline GradCheckReport grad_check(const std::vector<Param<double>*>& params,
                                  const std::function<double(bool)>& loss_fn,
                                  double h = 1e-5, double tol = 1e-4,
                                  size_t min_checks = 200, uint64_t seed = 1) {
    for (auto* p : params) p->grad.setZero();
    loss_fn(true);
    std::vector<Mat<double>> analytic;
    analytic.reserve(params.size());
    for (auto* p : params) analytic.push_back(p->grad);

    size_t total = 0;
    for (auto* p : params) total += static_cast<size_t>(p->value.size());
    const size_t n_checks = std::min(total, min_checks);

    Rng rng(hash_combine(seed, 0x67636865636bull));
    GradCheckReport report;
    for (size_t c = 0; c < n_checks; ++c) {
        size_t flat = rng.uniform(total);
        size_t pi = 0;
        while (flat >= static_cast<size_t>(params[pi]->value.size())) {
            flat -= static_cast<size_t>(params[pi]->value.size());
            ++pi;
        }
        double* slot = params[pi]->value.data() + flat;
        const double saved = *slot;
        *slot = saved + h;
        double up = loss_fn(false);
        *slot = saved - h;
        double down = loss_fn(false);
        *slot = saved;
        double numeric = (up - down) / (2.0 * h);
        double a = analytic[pi].data()[flat];
        double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-3);
        report.max_rel_err = std::max(report.max_rel_err, rel);
        ++report.checked;
    }
    report.pass = report.max_rel_err < tol;
    return report;
}

}  // namespace igsm::nn
