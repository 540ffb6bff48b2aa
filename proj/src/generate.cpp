#include "igsm/generate.hpp"

#include <stdexcept>

#include "igsm/graph.hpp"
#include "igsm/render.hpp"
#include "igsm/rng.hpp"

namespace igsm {

uint64_t instance_seed(uint64_t dataset_seed, int op, int index) {
    return hash_combine(hash_combine(dataset_seed, static_cast<uint64_t>(op)),
                        static_cast<uint64_t>(index));
}

ProblemInstance generate_instance(int op, int index, const GenerateSpec& spec,
                                  const Vocabulary& vocab, const Tokenizer& tokenizer) {
    const uint64_t seed = instance_seed(spec.dataset_seed, op, index);
    DependencyGraph graph = build_graph(op, vocab, seed, spec.modulus);
    RenderedProblem rendered = render_problem(graph, vocab, hash_combine(seed, 1));

    ProblemInstance inst;
    inst.id = "d" + std::to_string(spec.dataset_seed) + "-op" + std::to_string(op) + "-" +
              std::to_string(index);
    inst.ops = op;
    inst.edges = graph.total_edges();
    inst.question = rendered.question;
    inst.cot = rendered.cot;
    inst.answer = rendered.answer;
    inst.cot_token_length = tokenizer.count_tokens(rendered.cot);
    inst.seed = seed;
    return inst;
}

std::vector<ProblemInstance> generate_dataset(const GenerateSpec& spec,
                                              const Vocabulary& vocab,
                                              const Tokenizer& tokenizer) {
    if (spec.ops_lo > spec.ops_hi || spec.ops_lo < 1)
        throw InfeasibleOps("generate_dataset: empty or invalid ops range");
    if (spec.per_op < 1) throw std::invalid_argument("generate_dataset: per_op must be >= 1");
    std::vector<ProblemInstance> out;
    out.reserve(static_cast<size_t>(spec.ops_hi - spec.ops_lo + 1) * spec.per_op);
    for (int op = spec.ops_lo; op <= spec.ops_hi; ++op)
        for (int i = 0; i < spec.per_op; ++i)
            out.push_back(generate_instance(op, i, spec, vocab, tokenizer));
    return out;
}

}  // namespace igsm
