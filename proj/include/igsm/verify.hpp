#pragma once

#include <stdexcept>

#include "igsm/instance.hpp"

namespace igsm {

struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Independent oracle: re-parses the question sentences into a dependency
// structure, recomputes every value exhaustively, and checks the stored
// answer, op count, edge count and CoT step count. Throws ParseFailure when
// the text does not match the generator grammar.
bool verify_instance(const ProblemInstance& inst, int modulus = 23);

}  // namespace igsm
