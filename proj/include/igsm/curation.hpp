#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/instance.hpp"

namespace igsm {

struct CurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingAnnotation : CurationError {
    using CurationError::CurationError;
};
struct MissingScorer : CurationError {
    using CurationError::CurationError;
};
struct PlanExceedsPool : CurationError {
    using CurationError::CurationError;
};
struct BucketUnderfull : CurationError {
    BucketUnderfull(int bucket_, size_t have_, size_t need_)
        : CurationError("bucket " + std::to_string(bucket_) + " holds " +
                        std::to_string(have_) + " examples, need " + std::to_string(need_)),
          bucket(bucket_), have(have_), need(need_) {}
    int bucket;
    size_t have;
    size_t need;
};

enum class Metric { OpCount, CotTokenLength, NllPerToken, FailureRate };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

struct Bucket {
    double lo = 0;
    double hi = 0;
    bool closed_hi = false;  // top failure-rate interval is [0.75, 1.00]

    bool contains(double v) const { return v >= lo && (closed_hi ? v <= hi : v < hi); }
};

struct DifficultyScheme {
    Metric metric = Metric::OpCount;
    std::vector<Bucket> buckets;  // disjoint, sorted, half-open (last may be closed)

    void validate() const;
};

// Built-in schemes.
DifficultyScheme cot_length_scheme();                  // seven token-length buckets
DifficultyScheme nll_scheme();                         // seven NLL intervals
DifficultyScheme failure_rate_scheme();                // four failure-rate intervals
DifficultyScheme op_count_scheme(int lo, int hi);      // width-1 op buckets

using NllScorer = std::function<double(const ProblemInstance&)>;

double score(const ProblemInstance& inst, Metric metric, const NllScorer& scorer = nullptr);

std::optional<size_t> assign_bucket(double value, const DifficultyScheme& scheme);

struct SamplePlan {
    size_t pool_size = 0;
    std::vector<size_t> sizes;  // strictly ascending, max <= pool_size
    uint64_t seed = 0;

    void validate() const;
};

// One seeded shuffle; subset(N) is the first N elements, so subsets are nested.
std::map<size_t, std::vector<ProblemInstance>> nested_sample(
    const std::vector<ProblemInstance>& pool, const SamplePlan& plan);

enum class ExtremeSide { Shortest, Longest };

// Removes ceil(q*n) examples from the chosen extreme under the metric, ties
// broken by id; survivors keep their original relative order.
std::vector<ProblemInstance> filter_extremes(const std::vector<ProblemInstance>& corpus,
                                             Metric metric, double q, ExtremeSide side,
                                             const NllScorer& scorer = nullptr);

struct StratifiedPools {
    std::map<size_t, std::vector<ProblemInstance>> pools;  // bucket index -> pool
    size_t skipped_missing = 0;  // counted, never silently dropped
};

StratifiedPools stratified_pools(const std::vector<ProblemInstance>& corpus,
                                 const DifficultyScheme& scheme, size_t pool_size,
                                 uint64_t seed, const NllScorer& scorer = nullptr);

// Reproducibility record: scheme, seed, per-bucket counts and id lists.
std::string curation_manifest_json(const DifficultyScheme& scheme, uint64_t seed,
                                   const StratifiedPools& pools);

}  // namespace igsm
