#include "igsm/render.hpp"

#include <numeric>

#include "igsm/rng.hpp"

namespace igsm {

namespace {

std::string param_name(const ParameterId& p, const Vocabulary& vocab) {
    return p.is_abstract() ? p.category : vocab.items[p.item];
}

std::string own_phrase(const ParameterId& p, const Vocabulary& vocab) {
    return vocab.containers[p.container] + "'s " + param_name(p, vocab);
}

std::string question_sentence(const Vertex& v, const DependencyGraph& g,
                              const Vocabulary& vocab) {
    auto ref = [&](int idx) { return parameter_phrase(g.vertices[idx].param, vocab); };
    const Expression& e = v.expr;
    std::string s = "The number of each " + own_phrase(v.param, vocab) + " equals ";
    switch (e.kind) {
        case ExprKind::Const:
            s += std::to_string(e.constant);
            break;
        case ExprKind::Scale:
            s += std::to_string(e.constant) + " times as much as " + ref(e.operands[0]);
            break;
        case ExprKind::Sum:
            s += "the sum of " + ref(e.operands[0]) + " and " + ref(e.operands[1]);
            break;
        case ExprKind::Diff:
            s += "the difference of " + ref(e.operands[0]) + " and " + ref(e.operands[1]);
            break;
        case ExprKind::ScaleSum:
            s += std::to_string(e.constant) + " times as much as the sum of " +
                 ref(e.operands[0]) + " and " + ref(e.operands[1]);
            break;
        case ExprKind::Aggregate: {
            s += "the sum of ";
            for (size_t i = 0; i < e.operands.size(); ++i) {
                if (i > 0) s += (i + 1 == e.operands.size()) ? " and " : ", ";
                s += ref(e.operands[i]);
            }
            break;
        }
    }
    return s + ".";
}

}  // namespace

std::string parameter_phrase(const ParameterId& param, const Vocabulary& vocab) {
    return "each " + own_phrase(param, vocab);
}

RenderedProblem render_problem(const DependencyGraph& graph, const Vocabulary& vocab,
                               uint64_t seed) {
    const int n = static_cast<int>(graph.vertices.size());
    Rng rng(hash_combine(seed, 0x72656e64ull));

    // Fresh single-letter variable names, drawn without replacement from a
    // seeded shuffle of the 52 Latin letters.
    std::vector<char> letters;
    for (char c = 'a'; c <= 'z'; ++c) letters.push_back(c);
    for (char c = 'A'; c <= 'Z'; ++c) letters.push_back(c);
    rng.shuffle(letters);
    size_t next_letter = 0;
    auto draw_letter = [&]() -> std::string {
        if (next_letter >= letters.size())
            throw RenderError("render_problem: variable letters exhausted");
        return std::string(1, letters[next_letter++]);
    };

    const std::vector<int> values = evaluate(graph);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    RenderedProblem out;
    for (int idx : order) {
        if (!out.question.empty()) out.question += " ";
        out.question += question_sentence(graph.vertices[idx], graph, vocab);
    }
    const Vertex& query = graph.vertices[graph.query];
    out.question += " How many " + param_name(query.param, vocab) + " does " +
                    vocab.containers[query.param.container] + " have?";

    std::vector<std::string> var(n);
    const int p = graph.modulus;
    for (int i = 0; i < n; ++i) {
        const Vertex& v = graph.vertices[i];
        const Expression& e = v.expr;
        var[i] = draw_letter();
        const std::string& x = var[i];
        auto num = [&](int idx) { return std::to_string(values[idx]); };
        std::string step = "Define " + own_phrase(v.param, vocab) + " as " + x + "; ";
        switch (e.kind) {
            case ExprKind::Const:
                step += "so " + x + " = " + std::to_string(e.constant) + ".";
                break;
            case ExprKind::Scale:
                step += "so " + x + " = " + std::to_string(e.constant) + " * " +
                        var[e.operands[0]] + " = " + std::to_string(e.constant) + " * " +
                        num(e.operands[0]) + " = " + std::to_string(values[i]) + ".";
                break;
            case ExprKind::Sum:
            case ExprKind::Diff: {
                const char* op = e.kind == ExprKind::Sum ? " + " : " - ";
                step += "so " + x + " = " + var[e.operands[0]] + op + var[e.operands[1]] +
                        " = " + num(e.operands[0]) + op + num(e.operands[1]) + " = " +
                        std::to_string(values[i]) + ".";
                break;
            }
            case ExprKind::ScaleSum: {
                // Intermediate sum receives its own letter, appendix style.
                std::string q = draw_letter();
                int qv = (values[e.operands[0]] + values[e.operands[1]]) % p;
                step += q + " = " + var[e.operands[0]] + " + " + var[e.operands[1]] + " = " +
                        num(e.operands[0]) + " + " + num(e.operands[1]) + " = " +
                        std::to_string(qv) + "; so " + x + " = " +
                        std::to_string(e.constant) + " * " + q + " = " +
                        std::to_string(e.constant) + " * " + std::to_string(qv) + " = " +
                        std::to_string(values[i]) + ".";
                break;
            }
            case ExprKind::Aggregate: {
                std::string syms, nums;
                for (size_t k = 0; k < e.operands.size(); ++k) {
                    if (k > 0) {
                        syms += " + ";
                        nums += " + ";
                    }
                    syms += var[e.operands[k]];
                    nums += num(e.operands[k]);
                }
                step += "so " + x + " = " + syms + " = " + nums + " = " +
                        std::to_string(values[i]) + ".";
                break;
            }
        }
        if (!out.cot.empty()) out.cot += " ";
        out.cot += step;
    }
    out.answer = values[graph.query];
    out.cot += " Answer: " + std::to_string(out.answer) + ".";
    return out;
}

}  // namespace igsm
