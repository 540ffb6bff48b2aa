#pragma once

#include <atomic>
#include <cstdio>
#include <map>
#include <thread>
#include <optional>
#include <string>
#include <vector>

#include "igsm/curation.hpp"
#include "igsm/infer.hpp"
#include "igsm/instance.hpp"
#include "igsm/trainer.hpp"

namespace igsm::nn {

// Parses the last "Answer: {v}" occurrence; v must be an integer in [0, p-1].
std::optional<int> extract_answer(const std::string& completion, int modulus = 23);

struct EvalResult {
    std::map<int, int> counts;    // op level -> test items
    std::map<int, int> correct;   // op level -> exact matches
    int total = 0;
    int total_correct = 0;

    double accuracy(int op) const {
        auto it = counts.find(op);
        return static_cast<double>(correct.at(op)) / static_cast<double>(it->second);
    }
    double aggregate() const {
        return total == 0 ? 0.0
                          : static_cast<double>(total_correct) / static_cast<double>(total);
    }
};

// Greedy decode + exact answer match, decomposed by op level. Levels with no
// test items are absent from the maps, not reported as zero.
template <class T>
EvalResult evaluate_model(const ModelParams<T>& m, const std::vector<ProblemInstance>& test,
                          const Tokenizer& tok) {
    EvalResult r;
    for (const auto& inst : test) {
        std::vector<int> prompt;
        prompt.push_back(tok.bos_id());
        for (int id : tok.encode(inst.question)) prompt.push_back(id);
        prompt.push_back(tok.sep_id());
        bool ok = false;
        if (static_cast<int>(prompt.size()) < m.config.context) {
            int budget = m.config.context - static_cast<int>(prompt.size()) - 1;
            auto out = decode_greedy(m, prompt, tok.eos_id(), budget);
            auto answer = extract_answer(tok.decode(out.ids));
            ok = answer && *answer == inst.answer;
        }
        ++r.counts[inst.ops];
        r.correct[inst.ops] += ok ? 1 : 0;
        ++r.total;
        r.total_correct += ok ? 1 : 0;
    }
    return r;
}

struct SweepCell {
    int size = 0;
    int difficulty = 0;
    uint64_t seed = 0;
    double base_acc = 0;   // aggregate accuracies in [0,1]
    double ft_acc = 0;
    bool failed = false;
    std::string error;

    double gain() const { return (ft_acc - base_acc) * 100.0; }  // percentage points
};

struct GainGrid {
    std::vector<int> sizes;         // ascending
    std::vector<int> difficulties;  // ascending op levels
    std::vector<uint64_t> seeds;
    std::string base_tag;
    std::vector<SweepCell> cells;

    const SweepCell* find(int size, int difficulty, uint64_t seed) const {
        for (const auto& c : cells)
            if (c.size == size && c.difficulty == difficulty && c.seed == seed) return &c;
        return nullptr;
    }
    // Mean gain over seeds with completed runs; nullopt if every seed failed.
    std::optional<double> mean_gain(int size, int difficulty) const {
        double acc = 0;
        int n = 0;
        for (const auto& c : cells)
            if (c.size == size && c.difficulty == difficulty && !c.failed) {
                acc += c.gain();
                ++n;
            }
        if (n == 0) return std::nullopt;
        return acc / n;
    }
};

std::string grid_csv(const GainGrid& grid);
GainGrid grid_from_csv(const std::string& csv);

// Per size, the difficulty with maximal seed-mean gain; ties toward the
// lowest difficulty. Sizes whose whole row failed are absent.
std::map<int, int> optimal_difficulty(const GainGrid& grid);

// Largest >0 to <0 crossing of a gain-vs-difficulty row, by linear
// interpolation; an exact zero at a grid point is itself a boundary.
std::optional<double> boundary_difficulty(const std::vector<std::pair<int, double>>& row);

struct SweepConfig {
    std::vector<int> sizes;
    std::vector<int> difficulties;
    std::vector<uint64_t> seeds;
    std::string base_tag;
    TrainRunConfig train;
    int progress_every = 0;  // cells; 0 = silent
    int n_workers = 1;       // (difficulty, seed) jobs scheduled across threads
};

// The 2-D size x difficulty sweep: per (difficulty, seed) one nested shuffle
// provides prefix subsets for every size; each cell fine-tunes a copy of the
// base model and is evaluated on the shared test set. Jobs are independent,
// results merge in fixed job order, so worker count never changes the output.
template <class T>
GainGrid run_sweep(const ModelParams<T>& base, const SweepConfig& cfg,
                   const std::map<int, std::vector<ProblemInstance>>& pools,
                   const std::vector<ProblemInstance>& test, const Tokenizer& tok,
                   std::map<std::string, std::vector<std::string>>* subset_ids = nullptr) {
    GainGrid grid;
    grid.sizes = cfg.sizes;
    grid.difficulties = cfg.difficulties;
    grid.seeds = cfg.seeds;
    grid.base_tag = cfg.base_tag;
    const double base_acc = evaluate_model(base, test, tok).aggregate();

    struct Job {
        int difficulty;
        uint64_t seed;
        std::vector<SweepCell> cells;
        std::vector<std::string> ids;
    };
    std::vector<Job> jobs;
    for (int difficulty : cfg.difficulties)
        for (uint64_t seed : cfg.seeds) jobs.push_back({difficulty, seed, {}, {}});

    std::atomic<size_t> next{0};
    std::atomic<int> done{0};
    auto worker = [&] {
        for (;;) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            Job& job = jobs[j];
            const auto& pool = pools.at(job.difficulty);
            SamplePlan plan{pool.size(), {}, job.seed};
            for (int s : cfg.sizes) plan.sizes.push_back(static_cast<size_t>(s));
            std::map<size_t, std::vector<ProblemInstance>> subsets;
            std::string draw_error;
            try {
                subsets = nested_sample(pool, plan);
                for (const auto& inst : subsets.at(plan.sizes.back()))
                    job.ids.push_back(inst.id);
            } catch (const std::exception& e) {
                draw_error = e.what();
            }
            for (int size : cfg.sizes) {
                SweepCell cell;
                cell.size = size;
                cell.difficulty = job.difficulty;
                cell.seed = job.seed;
                cell.base_acc = base_acc;
                if (!draw_error.empty()) {
                    cell.failed = true;
                    cell.error = draw_error;
                } else {
                    try {
                        std::vector<Tokenizer::Encoded> data;
                        for (const auto& inst : subsets.at(static_cast<size_t>(size)))
                            data.push_back(tok.tokenize_instance(inst, cfg.train.mask_prompt));
                        ModelParams<T> model = base;
                        TrainRunConfig tc = cfg.train;
                        tc.seed = hash_combine(
                            job.seed, hash_combine(static_cast<uint64_t>(size),
                                                   static_cast<uint64_t>(job.difficulty)));
                        train(model, tc, data);
                        cell.ft_acc = evaluate_model(model, test, tok).aggregate();
                    } catch (const std::exception& e) {
                        cell.failed = true;
                        cell.error = e.what();
                    }
                }
                job.cells.push_back(std::move(cell));
                const int d = done.fetch_add(1) + 1;
                if (cfg.progress_every > 0 && d % cfg.progress_every == 0)
                    std::fprintf(stderr, "[sweep] %d/%zu cells done\n", d,
                                 jobs.size() * cfg.sizes.size());
            }
        }
    };
    const int n_workers = std::max(1, cfg.n_workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    for (auto& job : jobs) {
        if (subset_ids && !job.ids.empty())
            (*subset_ids)["op" + std::to_string(job.difficulty) + "-seed" +
                          std::to_string(job.seed)] = std::move(job.ids);
        for (auto& cell : job.cells) grid.cells.push_back(std::move(cell));
    }
    return grid;
}

// Fig. 7-style decomposition: one accuracy-vs-test-op curve per labeled model.
struct DecomposedCurves {
    std::vector<std::pair<std::string, std::map<int, double>>> curves;
};

std::string curves_csv(const DecomposedCurves& curves);

template <class T>
DecomposedCurves decomposed_report(
    const std::vector<std::pair<std::string, const ModelParams<T>*>>& models,
    const std::vector<ProblemInstance>& test, const Tokenizer& tok) {
    DecomposedCurves out;
    for (const auto& [label, model] : models) {
        auto result = evaluate_model(*model, test, tok);
        std::map<int, double> curve;
        for (const auto& [op, count] : result.counts) {
            (void)count;
            curve[op] = result.accuracy(op);
        }
        out.curves.emplace_back(label, std::move(curve));
    }
    return out;
}

}  // namespace igsm::nn
