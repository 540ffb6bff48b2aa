#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/vocab.hpp"

namespace igsm {

inline constexpr int kDefaultModulus = 23;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VocabularyTooSmall : GraphError {
    using GraphError::GraphError;
};
struct InfeasibleOps : GraphError {
    using GraphError::GraphError;
};
struct CycleDetected : GraphError {
    using GraphError::GraphError;
};

// A parameter is "container's item" (instance) or "container's category" (abstract).
struct ParameterId {
    int container = 0;
    int item = -1;                 // >= 0 for instance parameters
    std::string category;          // non-empty for abstract parameters

    bool is_abstract() const { return item < 0; }
    bool operator==(const ParameterId&) const = default;
};

enum class ExprKind { Const, Scale, Sum, Diff, ScaleSum, Aggregate };

// Defining expression of a vertex. Operands reference earlier vertices by index.
struct Expression {
    ExprKind kind = ExprKind::Const;
    int constant = 0;              // in [0, p-1]; used by Const, Scale, ScaleSum
    std::vector<int> operands;     // distinct vertex indices

    int op_cost() const {
        switch (kind) {
            case ExprKind::Const:
            case ExprKind::Scale:
            case ExprKind::Sum:
            case ExprKind::Diff: return 1;
            case ExprKind::ScaleSum: return 2;
            case ExprKind::Aggregate: return static_cast<int>(operands.size()) - 1;
        }
        return 0;
    }
    int arity() const { return static_cast<int>(operands.size()); }
};

struct Vertex {
    ParameterId param;
    Expression expr;
};

struct DependencyGraph {
    std::vector<Vertex> vertices;  // topologically ordered: operands point backwards
    int query = 0;                 // vertex whose value is the answer
    int modulus = kDefaultModulus;

    int total_ops() const {
        int s = 0;
        for (const auto& v : vertices) s += v.expr.op_cost();
        return s;
    }
    int total_edges() const {
        int s = 0;
        for (const auto& v : vertices) s += v.expr.arity();
        return s;
    }
};

// Edge budget as a function of op count: floor(ops * 4/3) + 1.
int target_edges(int ops);

// Largest operand-edge count any valid graph with the given op budget admits.
int max_admissible_edges(int ops);

// Seeded construction of a DAG with total op cost exactly `ops` and
// min(target_edges(ops), max_admissible_edges(ops)) operand edges.
DependencyGraph build_graph(int ops, const Vocabulary& vocab, uint64_t seed,
                            int modulus = kDefaultModulus);

// Values of all vertices mod p, in vertex order.
std::vector<int> evaluate(const DependencyGraph& graph);

}  // namespace igsm
