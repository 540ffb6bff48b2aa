#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace igsm::gap {

struct GapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySample : GapError {
    using GapError::GapError;
};
struct DomainError : GapError {
    using GapError::GapError;
};

// A distribution over op-difficulty levels.
struct DiscreteDistribution {
    std::vector<int> support;       // ascending, duplicate-free
    std::vector<double> probs;      // nonnegative, sums to 1 within 1e-12

    void validate() const;
    static DiscreteDistribution uniform(int lo, int hi);
    static DiscreteDistribution from_histogram(const std::map<int, size_t>& counts);
};

struct RiskResult {
    double risk = 0;           // mean of min(loss, C), compensated summation
    double clip_fraction = 0;  // share of losses clipped at C
};

RiskResult empirical_risk(const std::vector<double>& losses, double C);

// C * sqrt((kl + ln(1/delta) + 2.5 ln n + 8) / (2n - 1)).
double pac_bayes_term(double kl, long n, double delta, double C);

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Sum p ln(p/q); +infinity when p puts mass outside q's support.
double kl_distributions(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct ExtrapolationTerms {
    double g_ext_tv = 0;
    double g_ext_kl = 0;  // may be infinity
};

ExtrapolationTerms extrapolation_terms(const DiscreteDistribution& p_test,
                                       const DiscreteDistribution& q_train, double C);

// KL between isotropic Gaussians N(theta, sigma^2 I): ||dtheta||^2 / (2 sigma^2).
// Labeled a proxy in every report; the squared distance comes from the caller.
double kl_weight_proxy(double squared_param_distance, double sigma);

struct TwoGapReport {
    size_t n = 0;
    double delta = 0;
    double C = 0;
    double sigma = 0;
    double kl_posterior_prior = 0;  // weight-space proxy
    double g_gen = 0;
    double tv = 0;
    double kl_dist = 0;  // may be infinity
    double g_ext_tv = 0;
    double g_ext_kl = 0;  // may be infinity
    double empirical_risk = 0;
    double clip_fraction = 0;
    double residual_epsilon = 0;  // order-level surrogate, not a certified bound
    double total_bound_tv = 0;
    double total_bound_kl = 0;  // may be infinity
};

TwoGapReport assemble_report(const std::vector<double>& losses, double squared_param_distance,
                             const DiscreteDistribution& p_test,
                             const DiscreteDistribution& q_train, double delta, double C,
                             double sigma);

std::string report_json(const TwoGapReport& r);
std::string report_csv(const TwoGapReport& r);

}  // namespace igsm::gap
