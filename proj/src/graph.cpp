#include "igsm/graph.hpp"

#include <algorithm>

#include "igsm/rng.hpp"

namespace igsm {

int target_edges(int ops) {
    if (ops < 1) throw InfeasibleOps("target_edges: ops must be >= 1");
    return ops * 4 / 3 + 1;
}

int max_admissible_edges(int ops) {
    if (ops < 1) throw InfeasibleOps("max_admissible_edges: ops must be >= 1");
    // One Const source, one unary vertex, every further op adds at most 2 operands.
    return ops == 1 ? 0 : 2 * ops - 3;
}

namespace {

struct KindPick {
    ExprKind kind;
    int cost;
    int edges;
};

// Sample the multiset of expression kinds: total cost = ops, total operand
// count = edge budget. Invariant kept throughout: rem_cost <= rem_edges <= 2*rem_cost.
std::vector<KindPick> sample_kinds(int ops, int edge_budget, Rng& rng) {
    std::vector<KindPick> kinds;
    kinds.push_back({ExprKind::Const, 1, 0});
    if (ops == 1) return kinds;
    kinds.push_back({ExprKind::Scale, 1, 1});
    int rem_cost = ops - 2;
    int rem_edges = edge_budget - 1;
    while (rem_cost > 0) {
        std::vector<KindPick> candidates;
        auto consider = [&](ExprKind k, int c, int e) {
            int rc = rem_cost - c, re = rem_edges - e;
            if (rc >= 0 && re >= rc && re <= 2 * rc) candidates.push_back({k, c, e});
        };
        consider(ExprKind::Scale, 1, 1);
        consider(ExprKind::Sum, 1, 2);
        consider(ExprKind::Diff, 1, 2);
        consider(ExprKind::ScaleSum, 2, 2);
        for (int k = 2; k <= 4; ++k)
            if (k <= static_cast<int>(kinds.size())) consider(ExprKind::Aggregate, k - 1, k);
        const auto& pick = candidates[rng.uniform(candidates.size())];
        kinds.push_back(pick);
        rem_cost -= pick.cost;
        rem_edges -= pick.edges;
    }
    return kinds;
}

bool arity_order_valid(const std::vector<KindPick>& kinds) {
    for (size_t i = 0; i < kinds.size(); ++i)
        if (kinds[i].edges > static_cast<int>(i)) return false;
    return kinds.empty() || kinds.back().kind != ExprKind::Aggregate;
}

// Place vertices so every arity fits its position and the query (last vertex)
// is an instance parameter.
std::vector<KindPick> order_kinds(std::vector<KindPick> kinds) {
    std::stable_sort(kinds.begin(), kinds.end(), [](const KindPick& a, const KindPick& b) {
        if (a.edges != b.edges) return a.edges < b.edges;
        return (a.kind == ExprKind::Aggregate) > (b.kind == ExprKind::Aggregate);
    });
    if (kinds.back().kind == ExprKind::Aggregate) {
        for (size_t j = kinds.size(); j-- > 0;) {
            if (kinds[j].kind != ExprKind::Aggregate) {
                std::rotate(kinds.begin() + j, kinds.begin() + j + 1, kinds.end());
                break;
            }
        }
    }
    return kinds;
}

// Degenerate but always-valid replacement: every Aggregate(k) becomes one Sum
// plus (k-2) Scales, preserving both op cost and operand count.
std::vector<KindPick> degrade_aggregates(const std::vector<KindPick>& kinds) {
    std::vector<KindPick> out;
    for (const auto& k : kinds) {
        if (k.kind != ExprKind::Aggregate) {
            out.push_back(k);
            continue;
        }
        out.push_back({ExprKind::Sum, 1, 2});
        for (int i = 0; i < k.edges - 2; ++i) out.push_back({ExprKind::Scale, 1, 1});
    }
    return out;
}

}  // namespace

DependencyGraph build_graph(int ops, const Vocabulary& vocab, uint64_t seed, int modulus) {
    if (ops < 1) throw InfeasibleOps("build_graph: ops must be >= 1");
    vocab.validate();
    Rng rng(hash_combine(seed, 0x69736d67ull));

    const int edge_budget = std::min(target_edges(ops), max_admissible_edges(ops));

    std::vector<KindPick> kinds;
    for (int attempt = 0;; ++attempt) {
        kinds = order_kinds(sample_kinds(ops, edge_budget, rng));
        if (arity_order_valid(kinds)) break;
        if (attempt >= 20) {
            kinds = order_kinds(degrade_aggregates(kinds));
            break;
        }
    }
    const int n = static_cast<int>(kinds.size());

    // Parent slots. First pass guarantees every non-query vertex is referenced
    // (so the whole graph is an ancestor set of the query); second pass fills
    // the remaining slots with random distinct earlier vertices.
    std::vector<std::vector<int>> parents(n);
    for (int i = 0; i < n; ++i) parents[i].assign(kinds[i].edges, -1);
    for (int j = n - 2; j >= 0; --j) {
        std::vector<std::pair<int, int>> slots;  // (vertex, slot)
        for (int w = j + 1; w < n; ++w) {
            if (std::find(parents[w].begin(), parents[w].end(), j) != parents[w].end()) continue;
            for (size_t s = 0; s < parents[w].size(); ++s)
                if (parents[w][s] < 0) slots.emplace_back(w, static_cast<int>(s));
        }
        const auto& [w, s] = slots[rng.uniform(slots.size())];
        parents[w][s] = j;
    }
    for (int w = 0; w < n; ++w) {
        for (auto& slot : parents[w]) {
            if (slot >= 0) continue;
            std::vector<int> candidates;
            for (int u = 0; u < w; ++u)
                if (std::find(parents[w].begin(), parents[w].end(), u) == parents[w].end())
                    candidates.push_back(u);
            slot = candidates[rng.uniform(candidates.size())];
        }
    }

    // Parameter names: distinct (container, item) pairs for instance vertices,
    // distinct (container, category) pairs for aggregates.
    int n_aggregate = 0;
    for (const auto& k : kinds) n_aggregate += (k.kind == ExprKind::Aggregate);
    const int n_instance = n - n_aggregate;
    if (static_cast<size_t>(n_instance) > vocab.instance_slots())
        throw VocabularyTooSmall("build_graph: need " + std::to_string(n_instance) +
                                 " instance parameters, vocabulary admits " +
                                 std::to_string(vocab.instance_slots()));
    std::vector<std::string> category_names;
    for (const auto& [name, members] : vocab.categories) category_names.push_back(name);
    if (static_cast<size_t>(n_aggregate) > vocab.containers.size() * category_names.size())
        throw VocabularyTooSmall("build_graph: not enough (container, category) pairs");

    std::vector<int> inst_pairs(vocab.instance_slots());
    for (size_t i = 0; i < inst_pairs.size(); ++i) inst_pairs[i] = static_cast<int>(i);
    rng.shuffle(inst_pairs);
    std::vector<int> abs_pairs(vocab.containers.size() * category_names.size());
    for (size_t i = 0; i < abs_pairs.size(); ++i) abs_pairs[i] = static_cast<int>(i);
    rng.shuffle(abs_pairs);

    DependencyGraph g;
    g.modulus = modulus;
    int inst_used = 0, abs_used = 0;
    for (int i = 0; i < n; ++i) {
        Vertex v;
        if (kinds[i].kind == ExprKind::Aggregate) {
            int pair = abs_pairs[abs_used++];
            v.param.container = pair / static_cast<int>(category_names.size());
            v.param.category = category_names[pair % category_names.size()];
        } else {
            int pair = inst_pairs[inst_used++];
            v.param.container = pair / static_cast<int>(vocab.items.size());
            v.param.item = pair % static_cast<int>(vocab.items.size());
        }
        v.expr.kind = kinds[i].kind;
        v.expr.operands = parents[i];
        switch (kinds[i].kind) {
            case ExprKind::Const: v.expr.constant = rng.uniform_int(0, modulus - 1); break;
            case ExprKind::Scale:
            case ExprKind::ScaleSum: v.expr.constant = rng.uniform_int(2, modulus - 1); break;
            default: break;
        }
        g.vertices.push_back(std::move(v));
    }
    g.query = n - 1;
    return g;
}

std::vector<int> evaluate(const DependencyGraph& graph) {
    const int p = graph.modulus;
    std::vector<int> value(graph.vertices.size(), 0);
    for (size_t i = 0; i < graph.vertices.size(); ++i) {
        const Expression& e = graph.vertices[i].expr;
        for (int op : e.operands)
            if (op < 0 || op >= static_cast<int>(i))
                throw CycleDetected("evaluate: operand does not precede its vertex");
        auto v = [&](int idx) { return value[idx]; };
        switch (e.kind) {
            case ExprKind::Const: value[i] = e.constant % p; break;
            case ExprKind::Scale: value[i] = e.constant * v(e.operands[0]) % p; break;
            case ExprKind::Sum: value[i] = (v(e.operands[0]) + v(e.operands[1])) % p; break;
            case ExprKind::Diff: value[i] = ((v(e.operands[0]) - v(e.operands[1])) % p + p) % p; break;
            case ExprKind::ScaleSum:
                value[i] = e.constant * ((v(e.operands[0]) + v(e.operands[1])) % p) % p;
                break;
            case ExprKind::Aggregate: {
                int s = 0;
                for (int op : e.operands) s = (s + v(op)) % p;
                value[i] = s;
                break;
            }
        }
    }
    return value;
}

}  // namespace igsm
