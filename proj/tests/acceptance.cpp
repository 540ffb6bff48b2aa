// Acceptance gate: twelve numbered criteria, one pass/fail line each.
// Criteria 1-6 are exact oracle checks and run in seconds; criteria 7-11
// train the desk-scale base model and its fine-tuned variants and take a
// few hours on one CPU core; criterion 12 re-runs a sweep from its manifest
// through the command-line binary and compares bytes.
//
// The process exits nonzero if any criterion fails. Failures print the
// measured values so an unattained qualitative trend is documented, never
// masked.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "igsm/curation.hpp"
#include "igsm/eval.hpp"
#include "igsm/generate.hpp"
#include "igsm/graph.hpp"
#include "igsm/model.hpp"
#include "igsm/tensor.hpp"
#include "igsm/trainer.hpp"
#include "igsm/twogap.hpp"
#include "igsm/verify.hpp"

namespace fs = std::filesystem;
using namespace igsm;
using nn::ModelParams;

namespace {

// Desk-scale experiment configuration. Model shape and the mid-training
// corpus scale are the free knobs; every fine-tuning hyperparameter below
// (batch 16, warmup 0.03, SFT lr 5e-5, DFT lr 1e-5, 3 epochs, cosine)
// is pinned and shared by all trend criteria.
constexpr int kLayers = 4;
constexpr int kHeads = 4;
constexpr int kDim = 96;
constexpr int kContext = 1024;
constexpr int kMidOpsLo = 2;
constexpr int kMidOpsHi = 6;
constexpr int kMidPerOp = 60000;    // "2k-analogue": scaled so 1 epoch converges
constexpr double kMidLr = 1e-3;     // from-scratch mid-training rate
constexpr uint64_t kMidSeed = 17;
constexpr uint64_t kTestSeed = 999;
constexpr uint64_t kPoolSeedBase = 4242;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail = "") {
    std::printf("criterion %2d: %s — %s%s%s\n", criterion, pass ? "PASS" : "FAIL",
                what.c_str(), detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// ---- criteria 1-6: exact oracles ----------------------------------------

void criterion_1() {
    const auto& vocab = default_vocabulary();
    Tokenizer tok(vocab);
    GenerateSpec spec{2, 20, 527, 7, kDefaultModulus};  // 19 levels * 527 > 10,000
    auto data = generate_dataset(spec, vocab, tok);
    size_t bad = 0;
    for (const auto& inst : data)
        if (!verify_instance(inst)) ++bad;
    report(1, data.size() >= 10000 && bad == 0, "generator correctness",
           std::to_string(data.size()) + " instances, " + std::to_string(bad) +
               " verification failures");
}

void criterion_2() {
    // The worked chain 8*7 -> 10, 10+7 -> 17, 22*17 -> 6 (mod 23), pushed
    // through the graph evaluator: Const 8; Scale 7*v0; Const 7; Sum; Scale 22.
    DependencyGraph g;
    g.modulus = 23;
    g.vertices.push_back({{0, 0, ""}, {ExprKind::Const, 8, {}}});
    g.vertices.push_back({{1, 0, ""}, {ExprKind::Scale, 7, {0}}});
    g.vertices.push_back({{2, 0, ""}, {ExprKind::Const, 7, {}}});
    g.vertices.push_back({{3, 0, ""}, {ExprKind::Sum, 0, {1, 2}}});
    g.vertices.push_back({{4, 0, ""}, {ExprKind::Scale, 22, {3}}});
    g.query = 4;
    auto values = evaluate(g);
    const bool ok = values[1] == 10 && values[3] == 17 && values[4] == 6;
    report(2, ok, "appendix arithmetic fidelity",
           "8*7=" + std::to_string(values[1]) + ", +7=" + std::to_string(values[3]) +
               ", *22=" + std::to_string(values[4]) + " (mod 23)");
}

void criterion_3() {
    bool formula_ok = true, clamp_ok = true;
    for (int ops = 1; ops <= 100; ++ops) {
        if (target_edges(ops) != ops * 4 / 3 + 1) formula_ok = false;
        if (ops >= 2) {
            const bool should_clamp = target_edges(ops) > max_admissible_edges(ops);
            const bool does_clamp = ops <= 4;  // 2*ops-3 < floor(4ops/3)+1 iff ops<=4
            if (should_clamp != does_clamp) clamp_ok = false;
        }
    }
    const auto& vocab = default_vocabulary();
    for (int ops = 2; ops <= 20 && clamp_ok; ++ops) {
        auto g = build_graph(ops, vocab, 99);
        if (g.total_edges() != std::min(target_edges(ops), max_admissible_edges(ops)))
            clamp_ok = false;
    }
    report(3, formula_ok && clamp_ok, "edge budget formula and clamping");
}

void criterion_4() {
    nn::TransformerConfig cfg;
    const auto& vocab = default_vocabulary();
    Tokenizer tok(vocab);
    cfg.vocab_size = tok.vocab_size();
    cfg.n_layers = 2;
    cfg.n_heads = 2;
    cfg.d_model = 16;
    cfg.context = 64;
    auto m = nn::init_params<double>(cfg, 5);
    std::vector<int> ids;
    auto inst = generate_dataset({2, 2, 1, 3, kDefaultModulus}, vocab, tok)[0];
    auto enc = tok.tokenize_instance(inst);
    enc.ids.resize(24);
    enc.loss_mask.resize(24);
    std::vector<nn::Param<double>*> params;
    for (auto& p : m.params) params.push_back(&p);
    auto loss_fn = [&](bool with_grad) {
        nn::Tape<double> tape;
        auto loss = nn::example_loss(tape, m, enc, nn::Objective::SFT, with_grad);
        double v = tape.value(loss)(0, 0);
        if (with_grad) tape.backward(loss);
        return v;
    };
    auto gc = nn::grad_check(params, loss_fn);

    // DFT per-token gradient = p_t * SFT per-token gradient. The sum over
    // tokens mixes weights, so check the identity on a single masked token
    // by zeroing every other mask entry.
    double ratio_err = 0;
    auto single = enc;
    int kept = -1;
    for (size_t i = 0; i < single.loss_mask.size(); ++i) {
        if (single.loss_mask[i] && kept < 0) kept = static_cast<int>(i);
        else single.loss_mask[i] = 0;
    }
    nn::Tape<double> t1, t2;
    auto m1 = m, m2 = m;
    for (auto& p : m1.params) p.grad.setZero();
    for (auto& p : m2.params) p.grad.setZero();
    auto l1 = nn::example_loss(t1, m1, single, nn::Objective::SFT);
    auto l2 = nn::example_loss(t2, m2, single, nn::Objective::DFT);
    const double sft_v = t1.value(l1)(0, 0);
    const double dft_v = t2.value(l2)(0, 0);
    const double pt = std::exp(-sft_v);  // single-token loss: -log p_t
    t1.backward(l1);
    t2.backward(l2);
    for (size_t i = 0; i < m1.params.size(); ++i) {
        const auto& a = m2.params[i].grad;
        const auto b = (m1.params[i].grad * pt).eval();
        const double denom = std::max(1e-12, b.norm());
        ratio_err = std::max(ratio_err, (a - b).norm() / denom);
    }
    ratio_err = std::max(ratio_err, std::abs(dft_v - pt * sft_v) /
                                        std::max(1e-12, pt * sft_v));
    const bool ok = gc.max_rel_err < 1e-4 && ratio_err < 1e-6;
    report(4, ok, "gradient fidelity",
           "grad_check max rel err " + fmt(gc.max_rel_err) + ", dft/sft ratio err " +
               fmt(ratio_err));
}

void criterion_5() {
    const double a = gap::pac_bayes_term(0, 1000, 0.05, 1);
    const double b = gap::pac_bayes_term(10, 5000, 0.1, 1);
    bool mono = true;
    Rng rng(77);
    for (int i = 0; i < 1000 && mono; ++i) {
        const double kl = 50.0 * rng.uniform_real();
        const long n = 2 + static_cast<long>(rng.uniform(100000));
        const double delta = 0.01 + 0.49 * rng.uniform_real();
        const double C = 0.1 + 9.9 * rng.uniform_real();
        if (gap::pac_bayes_term(kl + 1.0, n, delta, C) <=
            gap::pac_bayes_term(kl, n, delta, C))
            mono = false;
        if (gap::pac_bayes_term(kl, n + n, delta, C) >=
            gap::pac_bayes_term(kl, n, delta, C))
            mono = false;
    }
    const bool ok = std::abs(a - 0.11891) < 1e-5 && std::abs(b - 0.06450) < 1e-5 && mono;
    report(5, ok, "bound formula oracles and monotonicity",
           fmt(a) + " / " + fmt(b));
}

void criterion_6() {
    auto p = gap::DiscreteDistribution::uniform(2, 6);
    auto q = gap::DiscreteDistribution::uniform(2, 8);
    const double tv = gap::tv_distance(p, q);
    const double kl = gap::kl_distributions(p, q);
    bool pinsker = true;
    Rng rng(123);
    for (int i = 0; i < 10000 && pinsker; ++i) {
        const int n = 2 + static_cast<int>(rng.uniform(6));
        gap::DiscreteDistribution a, b;
        double sa = 0, sb = 0;
        for (int k = 0; k < n; ++k) {
            a.support.push_back(k);
            b.support.push_back(k);
            a.probs.push_back(1e-6 + rng.uniform_real());
            b.probs.push_back(1e-6 + rng.uniform_real());
            sa += a.probs.back();
            sb += b.probs.back();
        }
        for (int k = 0; k < n; ++k) {
            a.probs[k] /= sa;
            b.probs[k] /= sb;
        }
        const double t = gap::tv_distance(a, b);
        const double k2 = gap::kl_distributions(a, b);
        if (std::isfinite(k2) && t > std::sqrt(k2 / 2.0) + 1e-12) pinsker = false;
    }
    const bool ok = std::abs(tv - 2.0 / 7.0) < 1e-12 &&
                    std::abs(kl - std::log(7.0 / 5.0)) < 1e-12 && pinsker;
    report(6, ok, "divergence oracles and Pinsker", "tv " + fmt(tv) + ", kl " + fmt(kl));
}

// ---- criteria 7-11: trend experiments ------------------------------------

struct CellOutcome {
    nn::EvalResult eval;
    double gain = 0;  // percentage points vs the base aggregate
};

struct Trend {
    Tokenizer tok{default_vocabulary()};
    ModelParams<float> base;
    nn::EvalResult base_eval;
    std::vector<ProblemInstance> test;
    std::map<int, std::vector<ProblemInstance>> pools;  // difficulty -> 8000 instances
    nn::GainGrid grid;                                  // difficulties {4,6,8,12,16}
    // (difficulty, size, seed, objective) -> outcome for criteria 10 and 11
    std::map<std::tuple<int, int, uint64_t, int>, CellOutcome> cells;

    nn::TrainRunConfig finetune_cfg(nn::Objective obj) const {
        nn::TrainRunConfig tc;
        tc.stage = nn::Stage::Finetune;
        tc.objective = obj;
        tc.epochs = 3;
        tc.batch_size = 16;
        tc.lr = obj == nn::Objective::DFT ? 1e-5 : 5e-5;
        tc.schedule = nn::Schedule::Cosine;
        tc.warmup_ratio = 0.03;
        return tc;
    }

    void build_base() {
        nn::TransformerConfig cfg;
        cfg.vocab_size = tok.vocab_size();
        cfg.n_layers = kLayers;
        cfg.n_heads = kHeads;
        cfg.d_model = kDim;
        cfg.context = kContext;
        base = nn::init_params<float>(cfg, kMidSeed);
        nn::TrainRunConfig mc;
        mc.lr = kMidLr;
        auto result = nn::midtrain_base(base, kMidOpsLo, kMidOpsHi, kMidPerOp, kMidSeed,
                                        default_vocabulary(), tok, mc);
        std::fprintf(stderr, "[acceptance] base %s mid-trained, final loss %.3f\n",
                     result.tag.c_str(), result.log.back().loss);
        test = generate_dataset({2, 20, 50, kTestSeed, kDefaultModulus},
                                default_vocabulary(), tok);
        base_eval = nn::evaluate_model(base, test, tok);
        std::fprintf(stderr, "[acceptance] base aggregate accuracy %.3f\n",
                     base_eval.aggregate());
        for (int d : {4, 6, 8, 12, 14, 16})
            pools[d] = generate_dataset(
                {d, d, 8000, kPoolSeedBase + static_cast<uint64_t>(d), kDefaultModulus},
                default_vocabulary(), tok);
    }

    void run_grid() {
        nn::SweepConfig sc;
        sc.sizes = {500, 2000, 8000};
        sc.difficulties = {4, 6, 8, 12, 16};
        sc.seeds = {1, 2, 3};
        sc.base_tag = nn::midtrain_tag(kMidOpsLo, kMidOpsHi, kMidPerOp);
        sc.train = finetune_cfg(nn::Objective::SFT);
        sc.progress_every = 5;
        const char* w = std::getenv("IGSM_WORKERS");
        sc.n_workers = w ? std::max(1, std::atoi(w)) : 1;
        grid = nn::run_sweep(base, sc, pools, test, tok);
    }

    // Fine-tune one cell exactly as the sweep would and keep its full
    // per-op evaluation (the grid stores only aggregates).
    const CellOutcome& cell(int difficulty, int size, uint64_t seed, nn::Objective obj) {
        auto key = std::make_tuple(difficulty, size, seed, static_cast<int>(obj));
        auto it = cells.find(key);
        if (it != cells.end()) return it->second;
        SamplePlan plan{pools.at(difficulty).size(), {500, 2000, 8000}, seed};
        auto subsets = nested_sample(pools.at(difficulty), plan);
        std::vector<Tokenizer::Encoded> data;
        for (const auto& inst : subsets.at(static_cast<size_t>(size)))
            data.push_back(tok.tokenize_instance(inst, true));
        ModelParams<float> m = base;
        auto tc = finetune_cfg(obj);
        tc.seed = hash_combine(seed, hash_combine(static_cast<uint64_t>(size),
                                                  static_cast<uint64_t>(difficulty)));
        nn::train(m, tc, data);
        CellOutcome out;
        out.eval = nn::evaluate_model(m, test, tok);
        out.gain = (out.eval.aggregate() - base_eval.aggregate()) * 100.0;
        std::fprintf(stderr, "[acceptance] cell op%d size%d seed%llu %s: acc %.3f\n",
                     difficulty, size, static_cast<unsigned long long>(seed),
                     obj == nn::Objective::DFT ? "dft" : "sft", out.eval.aggregate());
        return cells.emplace(key, std::move(out)).first->second;
    }
};

void criterion_7(const Trend& t) {
    int nondecreasing = 0, saturating = 0;
    std::string detail;
    for (uint64_t seed : {1, 2, 3}) {
        std::vector<double> g;
        for (int size : {500, 2000, 8000}) g.push_back(t.grid.find(size, 6, seed)->gain());
        if (g[1] >= g[0] && g[2] >= g[1]) ++nondecreasing;
        if (g[2] - g[1] < g[1] - g[0]) ++saturating;
        detail += "s" + std::to_string(seed) + ":[" + fmt(g[0]) + "," + fmt(g[1]) + "," +
                  fmt(g[2]) + "] ";
    }
    report(7, nondecreasing >= 2 && saturating >= 2,
           "data size effect at op=6 (monotone 2/3, saturating 2/3)", detail);
}

void criterion_8(const Trend& t) {
    std::vector<int> diffs{4, 8, 12, 16};
    double best = -1e18;
    int arg = -1;
    std::string detail;
    for (int d : diffs) {
        const double g = *t.grid.mean_gain(2000, d);
        detail += "op" + std::to_string(d) + ":" + fmt(g) + " ";
        if (g > best) {
            best = g;
            arg = d;
        }
    }
    report(8, arg != 4 && arg != 16, "interior optimum at size 2000", detail);
}

void criterion_9(const Trend& t) {
    // Seed-averaged optima plus per-seed strict increase in >= 2 of 3 seeds.
    auto opt = nn::optimal_difficulty(t.grid);
    int strict = 0;
    for (uint64_t seed : {1, 2, 3}) {
        nn::GainGrid g1;
        g1.sizes = t.grid.sizes;
        g1.difficulties = t.grid.difficulties;
        g1.seeds = {seed};
        for (const auto& c : t.grid.cells)
            if (c.seed == seed) g1.cells.push_back(c);
        auto o = nn::optimal_difficulty(g1);
        if (o.at(8000) > o.at(500)) ++strict;
    }
    report(9, opt.at(8000) >= opt.at(500) && strict >= 2,
           "optimal difficulty shifts with size",
           "mean opt(500)=" + std::to_string(opt.at(500)) +
               ", opt(8000)=" + std::to_string(opt.at(8000)) + ", strict in " +
               std::to_string(strict) + "/3 seeds");
}

void criterion_10(Trend& t) {
    int easy_ok = 0, hard_ok = 0;
    std::string detail;
    for (uint64_t seed : {1, 2, 3}) {
        const auto& easy = t.cell(4, 500, seed, nn::Objective::SFT);
        const auto& hard = t.cell(16, 500, seed, nn::Objective::SFT);
        bool low_pos = true;
        for (int op = 2; op <= 6; ++op)
            if (easy.eval.accuracy(op) - t.base_eval.accuracy(op) <= 0) low_pos = false;
        double high_delta = 0;
        int n_high = 0;
        for (int op = 12; op <= 20; ++op) {
            high_delta += easy.eval.accuracy(op) - t.base_eval.accuracy(op);
            ++n_high;
        }
        if (low_pos && high_delta / n_high < 0) ++easy_ok;
        double hard_max = -1e18;
        for (const auto& [op, cnt] : t.base_eval.counts) {
            (void)cnt;
            hard_max = std::max(hard_max, hard.eval.accuracy(op) - t.base_eval.accuracy(op));
        }
        if (hard_max <= 0) ++hard_ok;
        detail += "s" + std::to_string(seed) + "(easy_low+" + (low_pos ? "y" : "n") +
                  ",easy_high" + fmt(high_delta / n_high) + ",hard_max" + fmt(hard_max) +
                  ") ";
    }
    report(10, easy_ok >= 2 && hard_ok >= 2, "failure-mode decomposition at size 500",
           detail);
}

void criterion_11(Trend& t) {
    double dft_small = 0, sft_small = 0, dft_large = 0, sft_large = 0;
    for (uint64_t seed : {1, 2, 3}) {
        dft_small += t.cell(14, 500, seed, nn::Objective::DFT).gain;
        sft_small += t.cell(14, 500, seed, nn::Objective::SFT).gain;
        dft_large += t.cell(14, 8000, seed, nn::Objective::DFT).gain;
        sft_large += t.cell(14, 8000, seed, nn::Objective::SFT).gain;
    }
    dft_small /= 3;
    sft_small /= 3;
    dft_large /= 3;
    sft_large /= 3;
    report(11, dft_small >= sft_small && sft_large >= dft_large,
           "dft/sft crossover at op=14",
           "small: dft " + fmt(dft_small) + " vs sft " + fmt(sft_small) + "; large: dft " +
               fmt(dft_large) + " vs sft " + fmt(sft_large));
}

// ---- criterion 12: manifest determinism through the CLI ------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IGSM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_12() {
    const fs::path dir = fs::temp_directory_path() / "igsm-acceptance-determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();
    bool ok = true;
    ok &= run_cli("generate --ops 2..3 --per-op 40 --seed 5 --out " + d + "/c.jsonl") == 0;
    ok &= run_cli("generate --ops 2..3 --per-op 5 --seed 6 --out " + d + "/t.jsonl") == 0;
    ok &= run_cli("curate --in " + d + "/c.jsonl --ops 2..3 --pool-size 30 --seed 2 "
                  "--out-dir " + d + "/pools") == 0;
    ok &= run_cli("train --data " + d + "/c.jsonl --out-dir " + d + "/base "
                  "--stage midtrain --epochs 1 --layers 1 --heads 2 --dim 16 "
                  "--context 512 --precision f64") == 0;
    ok &= run_cli("sweep --base " + d + "/base/model.ckpt --test " + d + "/t.jsonl "
                  "--pools " + d + "/pools --sizes 8,16 --ops 2,3 --seeds 1,2 "
                  "--epochs 1 --precision f64 --out-dir " + d + "/s1") == 0;
    ok &= run_cli("sweep --from-manifest " + d + "/s1/manifest.json --out-dir " +
                  d + "/s2") == 0;
    const bool identical = ok && slurp(dir / "s1" / "grid.csv") ==
                                     slurp(dir / "s2" / "grid.csv") &&
                           !slurp(dir / "s1" / "grid.csv").empty();
    report(12, identical, "pipeline determinism from the manifest (reference mode)");
    fs::remove_all(dir);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();

    Trend t;
    t.build_base();
    // Convergence smoke oracle (unnumbered): fine-tuning the base for 3
    // epochs on a 1,000-example ops-[2,4] corpus drives the training loss
    // under 0.1 nats/token.
    {
        auto corpus = generate_dataset({2, 4, 334, 31337, kDefaultModulus},
                                       default_vocabulary(), t.tok);
        std::vector<Tokenizer::Encoded> data;
        for (const auto& inst : corpus) data.push_back(t.tok.tokenize_instance(inst, true));
        ModelParams<float> m = t.base;
        auto tc = t.finetune_cfg(nn::Objective::SFT);
        tc.seed = 8;
        auto log = nn::train(m, tc, data);
        double last_epoch = 0;
        int n = 0;
        for (const auto& row : log)
            if (row.epoch == tc.epochs - 1) {
                last_epoch += row.loss;
                ++n;
            }
        last_epoch /= n;
        const bool ok = last_epoch < 0.1;
        std::printf("convergence oracle: %s — final-epoch loss %.4f nats/token\n",
                    ok ? "PASS" : "FAIL", last_epoch);
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }

    t.run_grid();
    criterion_7(t);
    criterion_8(t);
    criterion_9(t);
    criterion_10(t);
    criterion_11(t);

    criterion_12();

    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
