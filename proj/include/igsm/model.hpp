#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/tensor.hpp"
#include "igsm/tokenizer.hpp"

namespace igsm::nn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TransformerConfig {
    int vocab_size = 0;
    int n_layers = 2;
    int n_heads = 4;
    int d_model = 64;
    int context = 1024;

    void validate() const {
        if (vocab_size <= 0) throw ConfigError("config: vocab_size must be positive");
        if (n_layers <= 0 || n_heads <= 0 || d_model <= 0 || context <= 0)
            throw ConfigError("config: dimensions must be positive");
        if (d_model % n_heads != 0)
            throw ConfigError("config: d_model must be divisible by n_heads");
    }
};

// Decoder-only transformer: learned positional embeddings, pre-norm blocks,
// GELU MLP with 4x expansion, untied output projection.
template <class T>
struct ModelParams {
    TransformerConfig config;
    std::vector<Param<T>> params;

    Param<T>& at(const std::string& name) {
        return params[index_.at(name)];
    }
    const Param<T>& at(const std::string& name) const { return params[index_.at(name)]; }

    std::vector<Param<T>*> all() {
        std::vector<Param<T>*> out;
        out.reserve(params.size());
        for (auto& p : params) out.push_back(&p);
        return out;
    }

    void add(const std::string& name, Mat<T> value) {
        index_[name] = params.size();
        params.push_back(Param<T>{name, std::move(value), {}, {}, {}});
        params.back().init_state();
    }

    // Squared L2 distance to another parameter set with identical shapes.
    double squared_distance(const ModelParams& other) const {
        double acc = 0;
        for (size_t i = 0; i < params.size(); ++i) {
            auto diff = (params[i].value - other.params[i].value).template cast<double>();
            acc += diff.cwiseProduct(diff).sum();
        }
        return acc;
    }

private:
    std::map<std::string, size_t> index_;
};

template <class T>
ModelParams<T> init_params(const TransformerConfig& cfg, uint64_t seed) {
    cfg.validate();
    ModelParams<T> m;
    m.config = cfg;
    Rng rng(hash_combine(seed, 0x696e6974ull));
    const T std_dev = static_cast<T>(0.02);
    const T resid_scale = static_cast<T>(1.0 / std::sqrt(2.0 * cfg.n_layers));
    auto randn = [&](Eigen::Index r, Eigen::Index c, T scale) {
        Mat<T> w(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                w(i, j) = static_cast<T>(rng.normal()) * scale;
        return w;
    };
    const int d = cfg.d_model;
    m.add("tok_emb", randn(cfg.vocab_size, d, std_dev));
    m.add("pos_emb", randn(cfg.context, d, std_dev));
    for (int l = 0; l < cfg.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        m.add(p + "ln1_g", Mat<T>::Ones(1, d));
        m.add(p + "ln1_b", Mat<T>::Zero(1, d));
        m.add(p + "w_qkv", randn(d, 3 * d, std_dev));
        m.add(p + "b_qkv", Mat<T>::Zero(1, 3 * d));
        m.add(p + "w_o", randn(d, d, std_dev * resid_scale));
        m.add(p + "b_o", Mat<T>::Zero(1, d));
        m.add(p + "ln2_g", Mat<T>::Ones(1, d));
        m.add(p + "ln2_b", Mat<T>::Zero(1, d));
        m.add(p + "w_fc", randn(d, 4 * d, std_dev));
        m.add(p + "b_fc", Mat<T>::Zero(1, 4 * d));
        m.add(p + "w_proj", randn(4 * d, d, std_dev * resid_scale));
        m.add(p + "b_proj", Mat<T>::Zero(1, d));
    }
    m.add("ln_f_g", Mat<T>::Ones(1, d));
    m.add("ln_f_b", Mat<T>::Zero(1, d));
    m.add("w_out", randn(d, cfg.vocab_size, std_dev));
    return m;
}

// Logits for every position (seq_len x vocab). With with_grad=false the
// parameters enter the tape as constants and backward produces nothing.
template <class T>
typename Tape<T>::Id forward_logits(Tape<T>& tape, ModelParams<T>& m,
                                    const std::vector<int>& ids, bool with_grad = true) {
    const auto& cfg = m.config;
    if (ids.empty()) throw ShapeMismatch("forward: empty sequence");
    if (static_cast<int>(ids.size()) > cfg.context)
        throw ShapeMismatch("forward: sequence of " + std::to_string(ids.size()) +
                            " tokens exceeds context " + std::to_string(cfg.context));
    auto use = [&](const std::string& name) {
        return with_grad ? tape.param(m.at(name)) : tape.constant(m.at(name).value);
    };
    std::vector<int> positions(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);

    auto x = tape.add(tape.embedding_lookup(use("tok_emb"), ids),
                      tape.embedding_lookup(use("pos_emb"), positions));
    for (int l = 0; l < cfg.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        auto h = tape.layer_norm(x, use(p + "ln1_g"), use(p + "ln1_b"));
        auto qkv = tape.add(tape.matmul(h, use(p + "w_qkv")), use(p + "b_qkv"));
        auto attn = tape.causal_self_attention(qkv, cfg.n_heads);
        x = tape.add(x, tape.add(tape.matmul(attn, use(p + "w_o")), use(p + "b_o")));
        auto h2 = tape.layer_norm(x, use(p + "ln2_g"), use(p + "ln2_b"));
        auto f = tape.gelu(tape.add(tape.matmul(h2, use(p + "w_fc")), use(p + "b_fc")));
        x = tape.add(x, tape.add(tape.matmul(f, use(p + "w_proj")), use(p + "b_proj")));
    }
    auto hf = tape.layer_norm(x, use("ln_f_g"), use("ln_f_b"));
    return tape.matmul(hf, use("w_out"));
}

// Shifted next-token targets: position t predicts ids[t+1]; the final row has
// no target and is masked out.
struct ShiftedTargets {
    std::vector<int> targets;
    std::vector<int> mask;
};

inline ShiftedTargets shift_targets(const Tokenizer::Encoded& enc) {
    const size_t n = enc.ids.size();
    ShiftedTargets out;
    out.targets.assign(n, 0);
    out.mask.assign(n, 0);
    for (size_t t = 0; t + 1 < n; ++t) {
        out.targets[t] = enc.ids[t + 1];
        out.mask[t] = enc.loss_mask[t + 1];
    }
    return out;
}

enum class Objective { SFT, DFT };

// Per-example loss node. SFT is the length-normalized token NLL; DFT reweights
// each token by its own detached target probability, so its parameter gradient
// per token is p_t times the SFT gradient.
template <class T>
typename Tape<T>::Id example_loss(Tape<T>& tape, ModelParams<T>& m,
                                  const Tokenizer::Encoded& enc, Objective objective,
                                  bool with_grad = true) {
    auto logits = forward_logits(tape, m, enc.ids, with_grad);
    auto st = shift_targets(enc);
    std::vector<T> weights(st.targets.size(), T(1));
    if (objective == Objective::DFT) {
        const Mat<T>& L = tape.value(logits);
        for (size_t t = 0; t < st.targets.size(); ++t) {
            if (!st.mask[t]) continue;
            auto row = L.row(static_cast<Eigen::Index>(t));
            T mx = row.maxCoeff();
            T z = (row.array() - mx).exp().sum();
            weights[t] = std::exp(row(st.targets[t]) - mx - std::log(z));
        }
    }
    return tape.cross_entropy_from_logits(logits, st.targets, st.mask, weights);
}

// Eq.-1 value for one example: mean NLL of the cot (and EOS) given the
// question; no gradients, no updates.
template <class T>
double nll_score(ModelParams<T>& m, const Tokenizer::Encoded& enc) {
    Tape<T> tape;
    auto loss = example_loss(tape, m, enc, Objective::SFT, /*with_grad=*/false);
    return static_cast<double>(tape.value(loss)(0, 0));
}

}  // namespace igsm::nn
