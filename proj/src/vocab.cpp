#include "igsm/vocab.hpp"

#include <set>

namespace igsm {

void Vocabulary::validate() const {
    if (containers.empty() || items.empty())
        throw VocabularyError("vocabulary: containers and items must be non-empty");
    std::set<std::string> seen;
    for (const auto& c : containers)
        if (!seen.insert(c).second) throw VocabularyError("vocabulary: duplicate container " + c);
    seen.clear();
    for (const auto& it : items)
        if (!seen.insert(it).second) throw VocabularyError("vocabulary: duplicate item " + it);
    for (const auto& [name, members] : categories) {
        if (members.size() < 2)
            throw VocabularyError("vocabulary: category " + name + " needs >= 2 members");
        for (int idx : members)
            if (idx < 0 || idx >= static_cast<int>(items.size()))
                throw VocabularyError("vocabulary: category " + name + " has out-of-range item");
    }
}

const Vocabulary& default_vocabulary() {
    static const Vocabulary vocab = [] {
        Vocabulary v;
        v.containers = {
            "Rucksack", "Satchel", "Toolbox", "Locker", "Crate",
            "Basket", "Drawer", "Cabinet", "Packable Travel Backpack", "Multi-Day Pack",
        };
        v.items = {
            "Calculator", "Stapler", "Notebook", "Eraser", "Compass",
            "Ruler", "Marker", "Pencil", "Scissors", "Protractor",
            "Sharpener", "Highlighter", "Hole Puncher", "Label Maker", "Binder Clip",
        };
        v.categories = {
            {"Stationery", {2, 3, 6, 7, 11}},
            {"Instrument", {0, 4, 9, 13}},
            {"Tool", {1, 5, 8, 10, 12, 14}},
        };
        v.validate();
        return v;
    }();
    return vocab;
}

}  // namespace igsm
