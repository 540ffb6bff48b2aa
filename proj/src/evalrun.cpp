#include "igsm/eval.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace igsm::nn {

std::optional<int> extract_answer(const std::string& completion, int modulus) {
    const std::string pattern = "Answer:";
    size_t at = completion.rfind(pattern);
    if (at == std::string::npos) return std::nullopt;
    size_t i = at + pattern.size();
    while (i < completion.size() && completion[i] == ' ') ++i;
    size_t start = i;
    while (i < completion.size() && std::isdigit(static_cast<unsigned char>(completion[i])))
        ++i;
    if (i == start || i - start > 9) return std::nullopt;
    int v = std::stoi(completion.substr(start, i - start));
    if (v < 0 || v >= modulus) return std::nullopt;
    return v;
}

std::string grid_csv(const GainGrid& grid) {
    std::ostringstream out;
    out << "size,difficulty,seed,base_acc,ft_acc,gain,failed\n";
    out.precision(17);
    for (const auto& c : grid.cells) {
        out << c.size << ',' << c.difficulty << ',' << c.seed << ',';
        if (c.failed)
            out << ",,,1\n";
        else
            out << c.base_acc << ',' << c.ft_acc << ',' << c.gain() << ",0\n";
    }
    return out.str();
}

GainGrid grid_from_csv(const std::string& csv) {
    GainGrid grid;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    auto remember = [](std::vector<int>& axis, int v) {
        if (std::find(axis.begin(), axis.end(), v) == axis.end()) {
            axis.push_back(v);
            std::sort(axis.begin(), axis.end());
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        SweepCell c;
        std::getline(row, field, ',');
        c.size = std::stoi(field);
        std::getline(row, field, ',');
        c.difficulty = std::stoi(field);
        std::getline(row, field, ',');
        c.seed = std::stoull(field);
        std::getline(row, field, ',');
        if (field.empty()) {
            c.failed = true;
            std::getline(row, field, ',');
            std::getline(row, field, ',');
        } else {
            c.base_acc = std::stod(field);
            std::getline(row, field, ',');
            c.ft_acc = std::stod(field);
            std::getline(row, field, ',');  // gain column is derived, ignored
        }
        std::getline(row, field, ',');
        if (field == "1") c.failed = true;
        remember(grid.sizes, c.size);
        remember(grid.difficulties, c.difficulty);
        if (std::find(grid.seeds.begin(), grid.seeds.end(), c.seed) == grid.seeds.end())
            grid.seeds.push_back(c.seed);
        grid.cells.push_back(std::move(c));
    }
    return grid;
}

std::map<int, int> optimal_difficulty(const GainGrid& grid) {
    std::map<int, int> out;
    for (int size : grid.sizes) {
        bool found = false;
        int best_difficulty = 0;
        double best_gain = 0;
        for (int difficulty : grid.difficulties) {
            auto g = grid.mean_gain(size, difficulty);
            if (!g) continue;
            if (!found || *g > best_gain) {  // strict: ties keep the lowest difficulty
                found = true;
                best_gain = *g;
                best_difficulty = difficulty;
            }
        }
        if (found) out[size] = best_difficulty;
    }
    return out;
}

std::optional<double> boundary_difficulty(const std::vector<std::pair<int, double>>& row) {
    std::optional<double> boundary;
    for (size_t i = 0; i < row.size(); ++i) {
        if (row[i].second == 0.0) boundary = static_cast<double>(row[i].first);
        if (i + 1 < row.size() && row[i].second > 0.0 && row[i + 1].second < 0.0) {
            const double x0 = row[i].first, x1 = row[i + 1].first;
            const double g0 = row[i].second, g1 = row[i + 1].second;
            boundary = x0 + (x1 - x0) * (g0 / (g0 - g1));
        }
    }
    return boundary;
}

std::string curves_csv(const DecomposedCurves& curves) {
    std::ostringstream out;
    out << "model_label,test_op,accuracy\n";
    out.precision(17);
    for (const auto& [label, curve] : curves.curves)
        for (const auto& [op, acc] : curve)
            out << label << ',' << op << ',' << acc << '\n';
    return out.str();
}

}  // namespace igsm::nn
