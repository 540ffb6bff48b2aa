#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "igsm/instance.hpp"
#include "igsm/vocab.hpp"

namespace igsm {

struct UnknownToken : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed word-level tokenizer over the generator grammar: template words,
// vocabulary nouns, variable letters, integers 0..p-1, punctuation, specials.
// encode(decode(ids)) and decode(encode(text)) are identities on generator output.
class Tokenizer {
public:
    Tokenizer(const Vocabulary& vocab, int modulus = kDefaultModulusTokens);

    static constexpr int kDefaultModulusTokens = 23;

    int pad_id() const { return 0; }
    int bos_id() const { return 1; }
    int eos_id() const { return 2; }
    int sep_id() const { return 3; }
    int unk_id() const { return 4; }
    int vocab_size() const { return static_cast<int>(tokens_.size()); }

    std::vector<int> encode(const std::string& text) const;  // throws UnknownToken
    std::string decode(const std::vector<int>& ids) const;
    const std::string& token(int id) const { return tokens_.at(id); }
    int count_tokens(const std::string& text) const {
        return static_cast<int>(encode(text).size());
    }

    // BOS + question + SEP + cot + EOS, plus the loss mask. With prompt
    // masking the mask is 1 exactly on the cot-and-EOS positions; without it,
    // on every position after BOS.
    struct Encoded {
        std::vector<int> ids;
        std::vector<int> loss_mask;
    };
    Encoded tokenize_instance(const ProblemInstance& inst, bool mask_prompt = true) const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace igsm
