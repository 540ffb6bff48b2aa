#pragma once

#include <string>
#include <vector>

#include "igsm/model.hpp"

namespace igsm::nn {

// Incremental decoder state: per-layer key/value caches, grown one position at
// a time. Pure Eigen forward math; no tape, no gradients.
template <class T>
class KvDecoder {
public:
    explicit KvDecoder(const ModelParams<T>& m) : m_(m) {
        k_cache_.resize(m.config.n_layers);
        v_cache_.resize(m.config.n_layers);
        const int d = m.config.d_model;
        for (int l = 0; l < m.config.n_layers; ++l) {
            k_cache_[l].resize(m.config.context, d);
            v_cache_[l].resize(m.config.context, d);
        }
    }

    int position() const { return pos_; }

    // Feeds one token and returns the logits row for the next prediction.
    Eigen::Matrix<T, 1, Eigen::Dynamic> step(int token) {
        const auto& cfg = m_.config;
        if (pos_ >= cfg.context) throw ShapeMismatch("decode: context exhausted");
        const int d = cfg.d_model, heads = cfg.n_heads, dh = d / heads;
        const T inv_sqrt_dh = T(1) / std::sqrt(static_cast<T>(dh));
        Eigen::Matrix<T, 1, Eigen::Dynamic> x =
            m_.at("tok_emb").value.row(token) + m_.at("pos_emb").value.row(pos_);
        for (int l = 0; l < cfg.n_layers; ++l) {
            const std::string p = "layer" + std::to_string(l) + ".";
            auto h = ln_row(x, m_.at(p + "ln1_g").value, m_.at(p + "ln1_b").value);
            Eigen::Matrix<T, 1, Eigen::Dynamic> qkv =
                h * m_.at(p + "w_qkv").value + m_.at(p + "b_qkv").value;
            k_cache_[l].row(pos_) = qkv.segment(d, d);
            v_cache_[l].row(pos_) = qkv.segment(2 * d, d);
            Eigen::Matrix<T, 1, Eigen::Dynamic> attn(d);
            for (int hd = 0; hd < heads; ++hd) {
                auto q = qkv.segment(hd * dh, dh);
                auto K = k_cache_[l].block(0, hd * dh, pos_ + 1, dh);
                auto V = v_cache_[l].block(0, hd * dh, pos_ + 1, dh);
                Eigen::Matrix<T, 1, Eigen::Dynamic> scores =
                    q * K.transpose() * inv_sqrt_dh;
                Eigen::Array<T, 1, Eigen::Dynamic> e =
                    (scores.array() - scores.maxCoeff()).exp();
                attn.segment(hd * dh, dh) = (e / e.sum()).matrix() * V;
            }
            x += attn * m_.at(p + "w_o").value + m_.at(p + "b_o").value;
            auto h2 = ln_row(x, m_.at(p + "ln2_g").value, m_.at(p + "ln2_b").value);
            Eigen::Matrix<T, 1, Eigen::Dynamic> f =
                h2 * m_.at(p + "w_fc").value + m_.at(p + "b_fc").value;
            static const T inv_sqrt2 = static_cast<T>(0.7071067811865475);
            f = f.array().unaryExpr([](T v) {
                return static_cast<T>(0.5) * v * (T(1) + std::erf(v * inv_sqrt2));
            });
            x += f * m_.at(p + "w_proj").value + m_.at(p + "b_proj").value;
        }
        ++pos_;
        auto hf = ln_row(x, m_.at("ln_f_g").value, m_.at("ln_f_b").value);
        return hf * m_.at("w_out").value;
    }

private:
    static Eigen::Matrix<T, 1, Eigen::Dynamic> ln_row(
        const Eigen::Matrix<T, 1, Eigen::Dynamic>& x, const Mat<T>& gamma,
        const Mat<T>& beta) {
        T mean = x.mean();
        auto centered = (x.array() - mean).eval();
        T inv_std = T(1) / std::sqrt(centered.square().mean() + static_cast<T>(1e-5));
        return ((centered * inv_std) * gamma.row(0).array() + beta.row(0).array()).matrix();
    }

    const ModelParams<T>& m_;
    std::vector<Mat<T>> k_cache_, v_cache_;
    int pos_ = 0;
};

struct DecodeResult {
    std::vector<int> ids;    // generated tokens, EOS excluded
    bool truncated = false;  // token budget or context ran out before EOS
};

// Greedy argmax decoding from the prompt until EOS or the budget. Argmax ties
// break toward the lowest token id, so decoding is fully deterministic.
template <class T>
DecodeResult decode_greedy(const ModelParams<T>& m, const std::vector<int>& prompt,
                           int eos_id, int max_new_tokens) {
    KvDecoder<T> dec(m);
    DecodeResult out;
    if (prompt.empty()) throw ShapeMismatch("decode: empty prompt");
    if (static_cast<int>(prompt.size()) >= m.config.context)
        throw ShapeMismatch("decode: prompt exceeds context");
    Eigen::Matrix<T, 1, Eigen::Dynamic> logits;
    for (int id : prompt) logits = dec.step(id);
    for (int produced = 0; produced < max_new_tokens; ++produced) {
        int best = 0;
        for (int j = 1; j < logits.cols(); ++j)
            if (logits(0, j) > logits(0, best)) best = j;
        if (best == eos_id) return out;
        out.ids.push_back(best);
        if (dec.position() >= m.config.context) {
            out.truncated = true;
            return out;
        }
        logits = dec.step(best);
    }
    out.truncated = max_new_tokens > 0;
    return out;
}

}  // namespace igsm::nn
