#include "igsm/instance.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace igsm {

std::string ProblemInstance::to_json_line() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["ops"] = ops;
    j["edges"] = edges;
    j["question"] = question;
    j["cot"] = cot;
    j["answer"] = answer;
    j["cot_token_length"] = cot_token_length;
    j["seed"] = seed;
    if (!annotations.empty()) j["annotations"] = annotations;
    return j.dump();
}

ProblemInstance ProblemInstance::from_json_line(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    ProblemInstance p;
    p.id = j.at("id").get<std::string>();
    p.ops = j.at("ops").get<int>();
    p.edges = j.at("edges").get<int>();
    p.question = j.at("question").get<std::string>();
    p.cot = j.at("cot").get<std::string>();
    p.answer = j.at("answer").get<int>();
    p.cot_token_length = j.at("cot_token_length").get<int>();
    p.seed = j.at("seed").get<uint64_t>();
    if (j.contains("annotations"))
        p.annotations = j.at("annotations").get<std::map<std::string, double>>();
    return p;
}

void write_jsonl(const std::string& path, const std::vector<ProblemInstance>& instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_jsonl: cannot open " + path);
    for (const auto& p : instances) out << p.to_json_line() << "\n";
}

std::vector<ProblemInstance> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_jsonl: cannot open " + path);
    std::vector<ProblemInstance> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(ProblemInstance::from_json_line(line));
    }
    return out;
}

}  // namespace igsm
