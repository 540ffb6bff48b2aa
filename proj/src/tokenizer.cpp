#include "igsm/tokenizer.hpp"

#include <sstream>

namespace igsm {

namespace {

const std::vector<std::string> kPunct = {".", ";", ",", "?", ":", "'s", "=", "+", "-", "*"};
const std::vector<std::string> kTemplateWords = {
    "The", "number", "of", "each", "equals", "times", "as", "much", "the",
    "sum", "difference", "and", "How", "many", "does", "have", "Define",
    "so", "Answer",
};
// Tokens that attach to the previous word with no leading space.
bool glued(const std::string& t) {
    return t == "." || t == ";" || t == "," || t == "?" || t == ":" || t == "'s";
}

void split_words(const std::string& phrase, std::vector<std::string>& out) {
    std::istringstream ss(phrase);
    std::string w;
    while (ss >> w) out.push_back(w);
}

}  // namespace

Tokenizer::Tokenizer(const Vocabulary& vocab, int modulus) {
    tokens_ = {"<pad>", "<bos>", "<eos>", "<sep>", "<unk>"};
    auto add = [&](const std::string& t) {
        if (index_.emplace(t, static_cast<int>(tokens_.size())).second) tokens_.push_back(t);
    };
    for (size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = static_cast<int>(i);
    for (const auto& t : kPunct) add(t);
    for (const auto& t : kTemplateWords) add(t);
    for (int v = 0; v < modulus; ++v) add(std::to_string(v));
    for (char c = 'a'; c <= 'z'; ++c) add(std::string(1, c));
    for (char c = 'A'; c <= 'Z'; ++c) add(std::string(1, c));
    std::vector<std::string> words;
    for (const auto& c : vocab.containers) split_words(c, words);
    for (const auto& it : vocab.items) split_words(it, words);
    for (const auto& [name, members] : vocab.categories) split_words(name, words);
    for (const auto& w : words) add(w);
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
    std::vector<int> ids;
    auto lookup = [&](const std::string& t) {
        auto it = index_.find(t);
        if (it == index_.end()) throw UnknownToken("tokenizer: unknown token '" + t + "'");
        ids.push_back(it->second);
    };
    std::istringstream ss(text);
    std::string chunk;
    while (ss >> chunk) {
        std::vector<std::string> tail;
        for (;;) {
            if (chunk.size() > 1 &&
                (chunk.back() == '.' || chunk.back() == ';' || chunk.back() == ',' ||
                 chunk.back() == '?' || chunk.back() == ':')) {
                tail.emplace_back(1, chunk.back());
                chunk.pop_back();
            } else if (chunk.size() > 2 && chunk.ends_with("'s")) {
                tail.emplace_back("'s");
                chunk.resize(chunk.size() - 2);
            } else {
                break;
            }
        }
        lookup(chunk);
        for (auto it = tail.rbegin(); it != tail.rend(); ++it) lookup(*it);
    }
    return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
        const std::string& t = tokens_.at(id);
        if (!out.empty() && !glued(t)) out += " ";
        out += t;
    }
    return out;
}

Tokenizer::Encoded Tokenizer::tokenize_instance(const ProblemInstance& inst,
                                                bool mask_prompt) const {
    Encoded enc;
    enc.ids.push_back(bos_id());
    for (int id : encode(inst.question)) enc.ids.push_back(id);
    enc.ids.push_back(sep_id());
    const size_t cot_start = enc.ids.size();
    for (int id : encode(inst.cot)) enc.ids.push_back(id);
    enc.ids.push_back(eos_id());
    enc.loss_mask.assign(enc.ids.size(), 0);
    const size_t first = mask_prompt ? cot_start : 1;
    for (size_t i = first; i < enc.ids.size(); ++i) enc.loss_mask[i] = 1;
    return enc;
}

}  // namespace igsm
