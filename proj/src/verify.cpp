#include "igsm/verify.hpp"

#include <map>
#include <string>
#include <vector>

namespace igsm {

namespace {

struct ParsedNode {
    int constant = 0;
    int cost = 1;
    bool scale_after_sum = false;  // ScaleSum: constant * (sum of refs)
    bool subtract = false;         // Diff: refs[0] - refs[1]
    bool has_constant = false;     // Scale / ScaleSum / Const
    std::vector<std::string> refs;
};

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

bool consume(std::string& s, const std::string& prefix) {
    if (!s.starts_with(prefix)) return false;
    s.erase(0, prefix.size());
    return true;
}

// "each {C}'s {N}" -> "C\x01N"
std::string parse_ref(std::string s) {
    if (!consume(s, "each ")) throw ParseFailure("verify: bad reference '" + s + "'");
    size_t pos = s.find("'s ");
    if (pos == std::string::npos) throw ParseFailure("verify: bad reference '" + s + "'");
    return s.substr(0, pos) + '\x01' + s.substr(pos + 3);
}

std::vector<std::string> parse_ref_list(const std::string& s) {
    // "A, B and C" with refs free of commas and of the word "and".
    std::vector<std::string> parts;
    size_t start = 0;
    for (;;) {
        size_t comma = s.find(", ", start);
        if (comma == std::string::npos) break;
        parts.push_back(s.substr(start, comma - start));
        start = comma + 2;
    }
    std::string last = s.substr(start);
    size_t and_pos = last.find(" and ");
    if (and_pos == std::string::npos) throw ParseFailure("verify: bad sum list '" + s + "'");
    parts.push_back(last.substr(0, and_pos));
    parts.push_back(last.substr(and_pos + 5));
    std::vector<std::string> refs;
    for (auto& p : parts) refs.push_back(parse_ref(p));
    return refs;
}

}  // namespace

bool verify_instance(const ProblemInstance& inst, int modulus) {
    // Sentence split on '.' / '?' boundaries (the grammar has no inner dots).
    std::vector<std::string> sentences;
    std::string cur;
    for (char c : inst.question) {
        if (c == '.' || c == '?') {
            if (!cur.empty()) sentences.push_back(cur);
            cur.clear();
        } else if (!(cur.empty() && c == ' ')) {
            cur += c;
        }
    }
    if (!cur.empty()) throw ParseFailure("verify: question does not end with punctuation");
    if (sentences.size() < 2) throw ParseFailure("verify: too few sentences");

    std::map<std::string, ParsedNode> nodes;
    int total_edges = 0;
    for (size_t i = 0; i + 1 < sentences.size(); ++i) {
        std::string s = sentences[i];
        if (!consume(s, "The number of each "))
            throw ParseFailure("verify: bad sentence '" + sentences[i] + "'");
        size_t pos = s.find("'s ");
        if (pos == std::string::npos) throw ParseFailure("verify: missing parameter");
        std::string container = s.substr(0, pos);
        s.erase(0, pos + 3);
        size_t eq = s.find(" equals ");
        if (eq == std::string::npos) throw ParseFailure("verify: missing 'equals'");
        std::string key = container + '\x01' + s.substr(0, eq);
        std::string rest = s.substr(eq + 8);

        ParsedNode node;
        if (all_digits(rest)) {
            node.constant = std::stoi(rest);
            node.has_constant = true;
        } else if (consume(rest, "the sum of ")) {
            node.refs = parse_ref_list(rest);
            node.cost = static_cast<int>(node.refs.size()) - 1;
        } else if (consume(rest, "the difference of ")) {
            node.refs = parse_ref_list(rest);
            if (node.refs.size() != 2) throw ParseFailure("verify: difference needs 2 refs");
            node.subtract = true;
        } else {
            size_t sp = rest.find(' ');
            if (sp == std::string::npos || !all_digits(rest.substr(0, sp)))
                throw ParseFailure("verify: bad expression '" + rest + "'");
            node.constant = std::stoi(rest.substr(0, sp));
            node.has_constant = true;
            rest.erase(0, sp + 1);
            if (!consume(rest, "times as much as "))
                throw ParseFailure("verify: bad expression");
            if (consume(rest, "the sum of ")) {
                node.refs = parse_ref_list(rest);
                if (node.refs.size() != 2) throw ParseFailure("verify: scaled sum needs 2 refs");
                node.scale_after_sum = true;
                node.cost = 2;
            } else {
                node.refs = {parse_ref(rest)};
            }
        }
        total_edges += static_cast<int>(node.refs.size());
        if (!nodes.emplace(key, node).second) throw ParseFailure("verify: duplicate parameter");
    }

    // Query sentence: "How many {N} does {C} have"
    std::string q = sentences.back();
    if (!consume(q, "How many ")) throw ParseFailure("verify: bad query sentence");
    size_t does = q.find(" does ");
    if (does == std::string::npos || !q.ends_with(" have"))
        throw ParseFailure("verify: bad query sentence");
    std::string item = q.substr(0, does);
    std::string container = q.substr(does + 6, q.size() - does - 6 - 5);
    std::string query_key = container + '\x01' + item;
    if (!nodes.count(query_key)) throw ParseFailure("verify: query parameter undefined");

    // Exhaustive recomputation: evaluate whatever is ready until fixpoint.
    std::map<std::string, int> value;
    bool progress = true;
    while (value.size() < nodes.size() && progress) {
        progress = false;
        for (const auto& [key, node] : nodes) {
            if (value.count(key)) continue;
            bool ready = true;
            long long acc = 0;
            for (const auto& r : node.refs) {
                if (!nodes.count(r)) throw ParseFailure("verify: undefined reference");
                auto it = value.find(r);
                if (it == value.end()) {
                    ready = false;
                    break;
                }
            }
            if (!ready) continue;
            if (node.refs.empty()) {
                acc = node.constant;
            } else if (node.subtract) {
                acc = ((value[node.refs[0]] - value[node.refs[1]]) % modulus + modulus) % modulus;
            } else {
                for (const auto& r : node.refs) acc = (acc + value[r]) % modulus;
                if (node.has_constant) acc = acc * node.constant % modulus;
            }
            value[key] = static_cast<int>(acc % modulus);
            progress = true;
        }
    }
    if (value.size() < nodes.size()) return false;  // cyclic or unreachable definitions

    int total_ops = 0;
    for (const auto& [key, node] : nodes) total_ops += node.cost;

    size_t define_steps = 0;
    for (size_t pos = inst.cot.find("Define "); pos != std::string::npos;
         pos = inst.cot.find("Define ", pos + 1))
        ++define_steps;

    return value[query_key] == inst.answer && total_ops == inst.ops &&
           total_edges == inst.edges && define_steps == nodes.size();
}

}  // namespace igsm
