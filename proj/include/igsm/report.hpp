#pragma once

#include <stdexcept>
#include <string>

#include "igsm/eval.hpp"

namespace igsm::rep {

struct MalformedInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every figure is a view over numbers that also live in a sibling CSV; the
// CSVs are the source of truth and carry full precision.

// Seed-mean gain per (size, difficulty); failed/missing cells flagged.
std::string heatmap_csv(const nn::GainGrid& grid);
std::string heatmap_svg(const nn::GainGrid& grid);

// The same means organized as fixed-size rows (gain vs difficulty) and
// fixed-difficulty rows (gain vs size).
std::string slices_csv(const nn::GainGrid& grid);
std::string slice_by_size_svg(const nn::GainGrid& grid);
std::string slice_by_difficulty_svg(const nn::GainGrid& grid);

// Optimal difficulty per size (ties toward the lowest difficulty).
std::string optimal_csv(const nn::GainGrid& grid);
std::string optimal_svg(const nn::GainGrid& grid);

// Accuracy-vs-test-op curves for labeled models.
std::string curves_svg(const nn::DecomposedCurves& curves);

}  // namespace igsm::rep
