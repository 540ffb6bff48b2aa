#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace igsm {

struct VocabularyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Surface-text name banks for problem rendering: containers hold items, and
// categories name subsets of items (used by aggregate parameters).
struct Vocabulary {
    std::vector<std::string> containers;
    std::vector<std::string> items;
    std::map<std::string, std::vector<int>> categories;  // name -> item indices

    void validate() const;
    size_t instance_slots() const { return containers.size() * items.size(); }
};

// Built-in bank styled after the iGSM surface text (Rucksack, Hole Puncher, ...).
const Vocabulary& default_vocabulary();

}  // namespace igsm
