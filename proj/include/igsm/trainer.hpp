#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/checkpoint.hpp"
#include "igsm/generate.hpp"
#include "igsm/model.hpp"
#include "igsm/tensor.hpp"

namespace igsm::nn {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceDetected : TrainError {
    using TrainError::TrainError;
};
struct InfeasiblePlan : TrainError {
    using TrainError::TrainError;
};

enum class Schedule { Constant, Cosine };
enum class Stage { Midtrain, Finetune };

struct TrainRunConfig {
    Stage stage = Stage::Finetune;
    Objective objective = Objective::SFT;
    int epochs = 3;
    int batch_size = 16;
    double lr = 5e-5;
    Schedule schedule = Schedule::Cosine;
    double warmup_ratio = 0.03;
    uint64_t seed = 0;
    bool mask_prompt = true;
    // AdamW and stabilization settings.
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.01;
    double clip_norm = 1.0;
    // Where to park the last finite parameters if the loss diverges ("" = skip).
    std::string divergence_checkpoint;

    void validate() const {
        if (epochs < 1) throw TrainError("config: epochs must be >= 1");
        if (batch_size < 1) throw TrainError("config: batch size must be >= 1");
        if (!(warmup_ratio >= 0.0 && warmup_ratio < 0.5))
            throw TrainError("config: warmup ratio must be in [0, 0.5)");
        if (lr < 0) throw TrainError("config: negative learning rate");
    }
};

// Warmup is linear from 0; afterwards the cosine decays to 0 at total_steps
// and the constant schedule holds lr. Both are continuous at the boundary.
inline double schedule_lr(const TrainRunConfig& cfg, long step, long total_steps,
                          long warmup_steps) {
    if (warmup_steps > 0 && step < warmup_steps)
        return cfg.lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
    if (cfg.schedule == Schedule::Constant) return cfg.lr;
    const long span = std::max<long>(1, total_steps - warmup_steps);
    const double progress = static_cast<double>(step - warmup_steps) / static_cast<double>(span);
    return cfg.lr * 0.5 * (1.0 + std::cos(3.141592653589793 * std::min(1.0, progress)));
}

struct TrainLogRow {
    long step = 0;
    int epoch = 0;
    double lr = 0;
    double loss = 0;
    double grad_norm = 0;
    bool clipped = false;
};

inline std::string train_log_csv(const std::vector<TrainLogRow>& log) {
    std::ostringstream out;
    out << "step,epoch,lr,loss,grad_norm,clipped\n";
    out.precision(10);
    for (const auto& r : log)
        out << r.step << ',' << r.epoch << ',' << r.lr << ',' << r.loss << ','
            << r.grad_norm << ',' << (r.clipped ? 1 : 0) << '\n';
    return out.str();
}

// One decoupled-weight-decay adaptive-moments step over all parameters;
// returns the pre-clip global gradient norm.
template <class T>
double adamw_step(ModelParams<T>& m, const TrainRunConfig& cfg, double lr, long t,
                  bool* clipped = nullptr) {
    double sq = 0;
    for (auto& p : m.params) sq += p.grad.template cast<double>().cwiseAbs2().sum();
    const double norm = std::sqrt(sq);
    T scale = T(1);
    bool did_clip = false;
    if (cfg.clip_norm > 0 && norm > cfg.clip_norm) {
        scale = static_cast<T>(cfg.clip_norm / norm);
        did_clip = true;
    }
    if (clipped) *clipped = did_clip;
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    const T corr1 = static_cast<T>(1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
    const T corr2 = static_cast<T>(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
    const T eps = static_cast<T>(cfg.adam_eps), wd = static_cast<T>(cfg.weight_decay);
    const T step_lr = static_cast<T>(lr);
    for (auto& p : m.params) {
        auto g = (p.grad.array() * scale).eval();
        p.adam_m.array() = b1 * p.adam_m.array() + (T(1) - b1) * g;
        p.adam_v.array() = b2 * p.adam_v.array() + (T(1) - b2) * g * g;
        auto mhat = p.adam_m.array() / corr1;
        auto vhat = p.adam_v.array() / corr2;
        p.value.array() -= step_lr * (mhat / (vhat.sqrt() + eps) + wd * p.value.array());
    }
    return norm;
}

// The full loop: seeded per-epoch shuffle, batch-mean gradients, clipping,
// AdamW under the configured schedule. Deterministic for fixed inputs.
template <class T>
std::vector<TrainLogRow> train(ModelParams<T>& m, const TrainRunConfig& cfg,
                               const std::vector<Tokenizer::Encoded>& data) {
    cfg.validate();
    if (data.empty()) throw TrainError("train: empty dataset");
    const long steps_per_epoch =
        (static_cast<long>(data.size()) + cfg.batch_size - 1) / cfg.batch_size;
    const long total_steps = steps_per_epoch * cfg.epochs;
    const long warmup_steps =
        static_cast<long>(std::ceil(cfg.warmup_ratio * static_cast<double>(total_steps)));

    std::vector<TrainLogRow> log;
    log.reserve(total_steps);
    long step = 0, adam_t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<size_t> order(data.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(hash_combine(hash_combine(cfg.seed, 0x65706f6368ull),
                             static_cast<uint64_t>(epoch)));
        rng.shuffle(order);
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_b = 1.0 / static_cast<double>(end - start);
            for (auto& p : m.params) p.grad.setZero();
            double batch_loss = 0;
            try {
                for (size_t i = start; i < end; ++i) {
                    Tape<T> tape;
                    auto loss = example_loss(tape, m, data[order[i]], cfg.objective);
                    batch_loss += static_cast<double>(tape.value(loss)(0, 0));
                    tape.backward(loss);
                }
            } catch (const NonFiniteInput&) {
                batch_loss = std::numeric_limits<double>::quiet_NaN();
            }
            batch_loss *= inv_b;
            for (auto& p : m.params) p.grad *= static_cast<T>(inv_b);
            if (!std::isfinite(batch_loss)) {
                if (!cfg.divergence_checkpoint.empty())
                    save_checkpoint(m, cfg.divergence_checkpoint);
                throw DivergenceDetected("train: non-finite loss at step " +
                                         std::to_string(step));
            }
            const double lr = schedule_lr(cfg, step, total_steps, warmup_steps);
            bool clipped = false;
            const double gnorm = adamw_step(m, cfg, lr, ++adam_t, &clipped);
            log.push_back({step, epoch, lr, batch_loss, gnorm, clipped});
            ++step;
        }
    }
    return log;
}

struct MidtrainResult {
    std::string tag;
    std::vector<TrainLogRow> log;
};

inline std::string midtrain_tag(int ops_lo, int ops_hi, int per_op) {
    std::string amount = per_op % 1000 == 0 ? std::to_string(per_op / 1000) + "k"
                                            : std::to_string(per_op);
    return "Ops[" + std::to_string(ops_lo) + "--" + std::to_string(ops_hi) + "]" + amount;
}

// Mid-training: generate the base corpus and run one epoch over it.
template <class T>
MidtrainResult midtrain_base(ModelParams<T>& m, int ops_lo, int ops_hi, int per_op,
                             uint64_t seed, const Vocabulary& vocab,
                             const Tokenizer& tokenizer, TrainRunConfig cfg = {}) {
    if (per_op <= 0) throw InfeasiblePlan("midtrain: per_op must be positive");
    GenerateSpec gen{ops_lo, ops_hi, per_op, hash_combine(seed, 0x6d696474ull),
                     kDefaultModulus};
    auto corpus = generate_dataset(gen, vocab, tokenizer);
    std::vector<Tokenizer::Encoded> encoded;
    encoded.reserve(corpus.size());
    for (const auto& inst : corpus)
        encoded.push_back(tokenizer.tokenize_instance(inst, cfg.mask_prompt));
    cfg.stage = Stage::Midtrain;
    cfg.epochs = 1;
    cfg.seed = seed;
    MidtrainResult result;
    result.tag = midtrain_tag(ops_lo, ops_hi, per_op);
    result.log = train(m, cfg, encoded);
    return result;
}

}  // namespace igsm::nn
