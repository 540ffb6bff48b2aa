#pragma once

#include <cstdint>
#include <string>

#include "igsm/graph.hpp"

namespace igsm {

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenderedProblem {
    std::string question;  // one sentence per vertex, seeded shuffle, query sentence last
    std::string cot;       // "Define ... as X; so X = ... = v." steps in topological order
    int answer = 0;
};

RenderedProblem render_problem(const DependencyGraph& graph, const Vocabulary& vocab,
                               uint64_t seed);

// "each {container}'s {name}" surface form of a parameter.
std::string parameter_phrase(const ParameterId& param, const Vocabulary& vocab);

}  // namespace igsm
