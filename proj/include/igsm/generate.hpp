#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "igsm/graph.hpp"
#include "igsm/instance.hpp"
#include "igsm/tokenizer.hpp"
#include "igsm/vocab.hpp"

namespace igsm {

struct GenerateSpec {
    int ops_lo = 2;
    int ops_hi = 8;
    int per_op = 2000;
    uint64_t dataset_seed = 0;
    int modulus = kDefaultModulus;
};

// Instance i of op level `op` is seeded by a stable hash of
// (dataset_seed, op, i), so output is independent of execution order.
uint64_t instance_seed(uint64_t dataset_seed, int op, int index);

ProblemInstance generate_instance(int op, int index, const GenerateSpec& spec,
                                  const Vocabulary& vocab, const Tokenizer& tokenizer);

// All instances, op-major then index order: per_op for each op in [lo, hi].
std::vector<ProblemInstance> generate_dataset(const GenerateSpec& spec,
                                              const Vocabulary& vocab,
                                              const Tokenizer& tokenizer);

}  // namespace igsm
