#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace igsm {

// One synthetic question/CoT/answer pair with difficulty metadata. The JSONL
// field names are a stable contract consumed by curation and the trainer.
struct ProblemInstance {
    std::string id;
    int ops = 0;
    int edges = 0;
    std::string question;
    std::string cot;
    int answer = 0;
    int cot_token_length = 0;
    uint64_t seed = 0;
    std::map<std::string, double> annotations;  // e.g. pass_rate, nll

    std::string to_json_line() const;
    static ProblemInstance from_json_line(const std::string& line);
};

void write_jsonl(const std::string& path, const std::vector<ProblemInstance>& instances);
std::vector<ProblemInstance> read_jsonl(const std::string& path);

}  // namespace igsm
