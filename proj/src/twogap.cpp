#include "igsm/twogap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace igsm::gap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Probability of `level` under d, zero off-support.
double mass(const DiscreteDistribution& d, int level) {
    auto it = std::lower_bound(d.support.begin(), d.support.end(), level);
    if (it == d.support.end() || *it != level) return 0.0;
    return d.probs[static_cast<size_t>(it - d.support.begin())];
}

std::vector<int> union_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    std::vector<int> u = p.support;
    u.insert(u.end(), q.support.begin(), q.support.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}
}  // namespace

void DiscreteDistribution::validate() const {
    if (support.size() != probs.size() || support.empty())
        throw DomainError("distribution: support/probability size mismatch");
    double total = 0;
    for (size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && support[i] <= support[i - 1])
            throw DomainError("distribution: support must be ascending and duplicate-free");
        if (probs[i] < 0) throw DomainError("distribution: negative probability");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("distribution: probabilities sum to " + std::to_string(total));
}

DiscreteDistribution DiscreteDistribution::uniform(int lo, int hi) {
    if (hi < lo) throw DomainError("uniform: empty range");
    DiscreteDistribution d;
    const double p = 1.0 / static_cast<double>(hi - lo + 1);
    for (int v = lo; v <= hi; ++v) {
        d.support.push_back(v);
        d.probs.push_back(p);
    }
    return d;
}

DiscreteDistribution DiscreteDistribution::from_histogram(const std::map<int, size_t>& counts) {
    size_t total = 0;
    for (const auto& [level, count] : counts) total += count;
    if (total == 0) throw EmptySample("from_histogram: no observations");
    DiscreteDistribution d;
    for (const auto& [level, count] : counts) {
        if (count == 0) continue;
        d.support.push_back(level);
        d.probs.push_back(static_cast<double>(count) / static_cast<double>(total));
    }
    return d;
}

RiskResult empirical_risk(const std::vector<double>& losses, double C) {
    if (losses.empty()) throw EmptySample("empirical_risk: no losses");
    if (!(C > 0)) throw DomainError("empirical_risk: C must be positive");
    double sum = 0, comp = 0;  // Kahan compensated summation
    size_t clipped = 0;
    for (double loss : losses) {
        double v = loss;
        if (v > C) {
            v = C;
            ++clipped;
        }
        if (v < 0) throw DomainError("empirical_risk: negative loss");
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return {sum / static_cast<double>(losses.size()),
            static_cast<double>(clipped) / static_cast<double>(losses.size())};
}

double pac_bayes_term(double kl, long n, double delta, double C) {
    if (kl < 0) throw DomainError("pac_bayes_term: negative kl");
    if (n < 1) throw DomainError("pac_bayes_term: n must be >= 1");
    if (!(delta > 0 && delta < 1)) throw DomainError("pac_bayes_term: delta outside (0,1)");
    if (!(C > 0)) throw DomainError("pac_bayes_term: C must be positive");
    const double nn = static_cast<double>(n);
    return C * std::sqrt((kl + std::log(1.0 / delta) + 2.5 * std::log(nn) + 8.0) /
                         (2.0 * nn - 1.0));
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    p.validate();
    q.validate();
    double acc = 0;
    for (int level : union_support(p, q)) acc += std::abs(mass(p, level) - mass(q, level));
    return acc / 2.0;
}

double kl_distributions(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    p.validate();
    q.validate();
    double acc = 0;
    for (size_t i = 0; i < p.support.size(); ++i) {
        const double pi = p.probs[i];
        if (pi == 0) continue;
        const double qi = mass(q, p.support[i]);
        if (qi == 0) return kInf;  // absolute-continuity failure
        acc += pi * std::log(pi / qi);
    }
    return std::max(0.0, acc);
}

ExtrapolationTerms extrapolation_terms(const DiscreteDistribution& p_test,
                                       const DiscreteDistribution& q_train, double C) {
    if (!(C > 0)) throw DomainError("extrapolation_terms: C must be positive");
    ExtrapolationTerms t;
    t.g_ext_tv = C * tv_distance(p_test, q_train);
    const double kl = kl_distributions(p_test, q_train);
    t.g_ext_kl = std::isinf(kl) ? kInf : C * std::sqrt(kl / 2.0);
    return t;
}

double kl_weight_proxy(double squared_param_distance, double sigma) {
    if (!(sigma > 0)) throw DomainError("kl_weight_proxy: sigma must be positive");
    if (squared_param_distance < 0)
        throw DomainError("kl_weight_proxy: negative squared distance");
    return squared_param_distance / (2.0 * sigma * sigma);
}

TwoGapReport assemble_report(const std::vector<double>& losses, double squared_param_distance,
                             const DiscreteDistribution& p_test,
                             const DiscreteDistribution& q_train, double delta, double C,
                             double sigma) {
    TwoGapReport r;
    r.n = losses.size();
    r.delta = delta;
    r.C = C;
    r.sigma = sigma;
    auto risk = empirical_risk(losses, C);
    r.empirical_risk = risk.risk;
    r.clip_fraction = risk.clip_fraction;
    r.kl_posterior_prior = kl_weight_proxy(squared_param_distance, sigma);
    r.g_gen = pac_bayes_term(r.kl_posterior_prior, static_cast<long>(r.n), delta, C);
    r.tv = tv_distance(p_test, q_train);
    r.kl_dist = kl_distributions(p_test, q_train);
    auto ext = extrapolation_terms(p_test, q_train, C);
    r.g_ext_tv = ext.g_ext_tv;
    r.g_ext_kl = ext.g_ext_kl;
    r.residual_epsilon =
        C * std::sqrt(std::log(static_cast<double>(r.n) / delta) / static_cast<double>(r.n));
    r.total_bound_tv = r.empirical_risk + r.g_gen + r.g_ext_tv;
    r.total_bound_kl = r.empirical_risk + r.g_gen + r.g_ext_kl;
    return r;
}

namespace {
nlohmann::ordered_json infinity_safe(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}
}  // namespace

std::string report_json(const TwoGapReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["delta"] = r.delta;
    j["C"] = r.C;
    j["sigma"] = r.sigma;
    j["kl_posterior_prior_proxy"] = r.kl_posterior_prior;
    j["kl_proxy_note"] = "isotropic-Gaussian weight-distance proxy";
    j["g_gen"] = r.g_gen;
    j["tv"] = r.tv;
    j["kl_dist"] = infinity_safe(r.kl_dist);
    j["g_ext_tv"] = r.g_ext_tv;
    j["g_ext_kl"] = infinity_safe(r.g_ext_kl);
    j["empirical_risk"] = r.empirical_risk;
    j["clip_fraction"] = r.clip_fraction;
    j["residual_epsilon"] = r.residual_epsilon;
    j["residual_note"] = "order-level surrogate, not a certified bound";
    j["total_bound_tv"] = r.total_bound_tv;
    j["total_bound_kl"] = infinity_safe(r.total_bound_kl);
    return j.dump(2);
}

std::string report_csv(const TwoGapReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "n,delta,C,sigma,kl_posterior_prior_proxy,g_gen,tv,kl_dist,g_ext_tv,g_ext_kl,"
           "empirical_risk,clip_fraction,residual_epsilon,total_bound_tv,total_bound_kl\n";
    out << r.n << ',' << r.delta << ',' << r.C << ',' << r.sigma << ','
        << r.kl_posterior_prior << ',' << r.g_gen << ',' << r.tv << ',' << r.kl_dist << ','
        << r.g_ext_tv << ',' << r.g_ext_kl << ',' << r.empirical_risk << ','
        << r.clip_fraction << ',' << r.residual_epsilon << ',' << r.total_bound_tv << ','
        << r.total_bound_kl << '\n';
    return out.str();
}

}  // namespace igsm::gap
