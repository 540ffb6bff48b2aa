#include "igsm/curation.hpp"

#include <algorithm>
#include <cmath>

#include "igsm/rng.hpp"
#include "json.hpp"

namespace igsm {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::OpCount: return "op_count";
        case Metric::CotTokenLength: return "cot_token_length";
        case Metric::NllPerToken: return "nll_per_token";
        case Metric::FailureRate: return "failure_rate";
    }
    return "?";
}

Metric metric_from_name(const std::string& name) {
    if (name == "op_count" || name == "ops") return Metric::OpCount;
    if (name == "cot_token_length" || name == "length") return Metric::CotTokenLength;
    if (name == "nll_per_token" || name == "nll") return Metric::NllPerToken;
    if (name == "failure_rate") return Metric::FailureRate;
    throw CurationError("unknown metric '" + name + "'");
}

void DifficultyScheme::validate() const {
    if (buckets.empty()) throw CurationError("scheme: no buckets");
    for (size_t i = 0; i < buckets.size(); ++i) {
        if (buckets[i].lo >= buckets[i].hi) throw CurationError("scheme: empty bucket");
        if (i > 0 && buckets[i].lo < buckets[i - 1].hi)
            throw CurationError("scheme: buckets overlap or are unsorted");
        if (buckets[i].closed_hi && i + 1 != buckets.size())
            throw CurationError("scheme: only the last bucket may be closed");
    }
}

DifficultyScheme cot_length_scheme() {
    DifficultyScheme s;
    s.metric = Metric::CotTokenLength;
    s.buckets = {{0, 1000},     {1000, 4000},   {4000, 6000},  {6000, 8000},
                 {8000, 12000}, {12000, 16000}, {16000, 20000}};
    return s;
}

DifficultyScheme nll_scheme() {
    DifficultyScheme s;
    s.metric = Metric::NllPerToken;
    s.buckets = {{0.4, 0.6}, {0.6, 0.8}, {0.8, 1.0}, {1.0, 1.2},
                 {1.2, 1.4}, {1.4, 1.8}, {1.8, 2.2}};
    return s;
}

DifficultyScheme failure_rate_scheme() {
    DifficultyScheme s;
    s.metric = Metric::FailureRate;
    s.buckets = {{0.00, 0.25}, {0.25, 0.50}, {0.50, 0.75}, {0.75, 1.00, true}};
    return s;
}

DifficultyScheme op_count_scheme(int lo, int hi) {
    DifficultyScheme s;
    s.metric = Metric::OpCount;
    for (int op = lo; op <= hi; ++op)
        s.buckets.push_back({static_cast<double>(op), static_cast<double>(op) + 1});
    return s;
}

double score(const ProblemInstance& inst, Metric metric, const NllScorer& scorer) {
    switch (metric) {
        case Metric::OpCount: return inst.ops;
        case Metric::CotTokenLength: return inst.cot_token_length;
        case Metric::NllPerToken:
            if (!scorer) throw MissingScorer("score: NllPerToken needs a scorer");
            return scorer(inst);
        case Metric::FailureRate: {
            auto it = inst.annotations.find("pass_rate");
            if (it == inst.annotations.end())
                throw MissingAnnotation("score: instance " + inst.id + " lacks pass_rate");
            return 1.0 - it->second;
        }
    }
    throw CurationError("score: bad metric");
}

std::optional<size_t> assign_bucket(double value, const DifficultyScheme& scheme) {
    scheme.validate();
    for (size_t i = 0; i < scheme.buckets.size(); ++i)
        if (scheme.buckets[i].contains(value)) return i;
    return std::nullopt;
}

void SamplePlan::validate() const {
    if (sizes.empty()) throw CurationError("plan: no sizes");
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0) throw CurationError("plan: zero size");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw CurationError("plan: sizes must be strictly ascending");
    }
    if (sizes.back() > pool_size)
        throw PlanExceedsPool("plan: max size " + std::to_string(sizes.back()) +
                              " exceeds pool " + std::to_string(pool_size));
}

std::map<size_t, std::vector<ProblemInstance>> nested_sample(
    const std::vector<ProblemInstance>& pool, const SamplePlan& plan) {
    plan.validate();
    if (plan.pool_size != pool.size())
        throw CurationError("nested_sample: plan pool_size does not match pool");
    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(hash_combine(plan.seed, 0x6e657374ull));
    rng.shuffle(order);
    std::map<size_t, std::vector<ProblemInstance>> out;
    for (size_t n : plan.sizes) {
        std::vector<ProblemInstance> subset;
        subset.reserve(n);
        for (size_t i = 0; i < n; ++i) subset.push_back(pool[order[i]]);
        out.emplace(n, std::move(subset));
    }
    return out;
}

std::vector<ProblemInstance> filter_extremes(const std::vector<ProblemInstance>& corpus,
                                             Metric metric, double q, ExtremeSide side,
                                             const NllScorer& scorer) {
    if (corpus.empty()) throw CurationError("filter_extremes: empty corpus");
    if (!(q > 0.0 && q < 0.5)) throw CurationError("filter_extremes: q must be in (0, 0.5)");
    const size_t k = static_cast<size_t>(std::ceil(q * static_cast<double>(corpus.size())));
    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double va = score(corpus[a], metric, scorer), vb = score(corpus[b], metric, scorer);
        if (va != vb) return va < vb;
        return corpus[a].id < corpus[b].id;
    });
    std::vector<char> removed(corpus.size(), 0);
    for (size_t i = 0; i < k; ++i) {
        size_t idx = side == ExtremeSide::Shortest ? order[i] : order[order.size() - 1 - i];
        removed[idx] = 1;
    }
    std::vector<ProblemInstance> out;
    out.reserve(corpus.size() - k);
    for (size_t i = 0; i < corpus.size(); ++i)
        if (!removed[i]) out.push_back(corpus[i]);
    return out;
}

StratifiedPools stratified_pools(const std::vector<ProblemInstance>& corpus,
                                 const DifficultyScheme& scheme, size_t pool_size,
                                 uint64_t seed, const NllScorer& scorer) {
    scheme.validate();
    StratifiedPools out;
    std::map<size_t, std::vector<size_t>> members;
    for (size_t i = 0; i < corpus.size(); ++i) {
        double v;
        try {
            v = score(corpus[i], scheme.metric, scorer);
        } catch (const MissingAnnotation&) {
            ++out.skipped_missing;
            continue;
        }
        if (auto b = assign_bucket(v, scheme)) members[*b].push_back(i);
    }
    for (size_t b = 0; b < scheme.buckets.size(); ++b) {
        auto it = members.find(b);
        const size_t have = it == members.end() ? 0 : it->second.size();
        if (have < pool_size) throw BucketUnderfull(static_cast<int>(b), have, pool_size);
    }
    for (auto& [b, idxs] : members) {
        Rng rng(hash_combine(hash_combine(seed, 0x706f6f6cull), b));
        rng.shuffle(idxs);
        std::vector<ProblemInstance> pool;
        pool.reserve(pool_size);
        for (size_t i = 0; i < pool_size; ++i) pool.push_back(corpus[idxs[i]]);
        out.pools.emplace(b, std::move(pool));
    }
    return out;
}

std::string curation_manifest_json(const DifficultyScheme& scheme, uint64_t seed,
                                   const StratifiedPools& pools) {
    nlohmann::ordered_json j;
    j["metric"] = metric_name(scheme.metric);
    auto& buckets = j["buckets"] = nlohmann::json::array();
    for (const auto& b : scheme.buckets)
        buckets.push_back({{"lo", b.lo}, {"hi", b.hi}, {"closed_hi", b.closed_hi}});
    j["seed"] = seed;
    j["skipped_missing_annotation"] = pools.skipped_missing;
    auto& per_bucket = j["pools"] = nlohmann::ordered_json::object();
    for (const auto& [b, pool] : pools.pools) {
        nlohmann::ordered_json entry;
        entry["count"] = pool.size();
        auto& ids = entry["ids"] = nlohmann::json::array();
        for (const auto& p : pool) ids.push_back(p.id);
        per_bucket[std::to_string(b)] = std::move(entry);
    }
    return j.dump(2);
}

}  // namespace igsm
