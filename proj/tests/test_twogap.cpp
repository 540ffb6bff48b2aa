#include <cmath>
#include <limits>

#include "doctest.h"
#include "igsm/rng.hpp"
#include "igsm/twogap.hpp"

using namespace igsm::gap;
using igsm::Rng;

namespace {

DiscreteDistribution random_distribution(Rng& rng, int max_support = 12) {
    DiscreteDistribution d;
    const int k = rng.uniform_int(1, max_support);
    int level = rng.uniform_int(2, 6);
    double total = 0;
    std::vector<double> raw;
    for (int i = 0; i < k; ++i) {
        d.support.push_back(level);
        level += rng.uniform_int(1, 3);
        double w = rng.uniform_real() + 1e-3;
        raw.push_back(w);
        total += w;
    }
    double acc = 0;
    for (size_t i = 0; i + 1 < raw.size(); ++i) {
        d.probs.push_back(raw[i] / total);
        acc += d.probs.back();
    }
    d.probs.push_back(1.0 - acc);  // exact normalization
    return d;
}

}  // namespace

TEST_CASE("pac_bayes_term matches the frozen scalar oracles") {
    CHECK(pac_bayes_term(0, 1000, 0.05, 1) == doctest::Approx(0.11891).epsilon(1e-4));
    CHECK(std::abs(pac_bayes_term(0, 1000, 0.05, 1) - 0.11891) < 1e-5);
    CHECK(std::abs(pac_bayes_term(10, 5000, 0.1, 1) - 0.06450) < 1e-5);
    // linear in C
    CHECK(pac_bayes_term(3, 700, 0.2, 2.0) ==
          doctest::Approx(2.0 * pac_bayes_term(3, 700, 0.2, 1.0)).epsilon(1e-15));
}

TEST_CASE("pac_bayes_term is strictly monotone over random tuples") {
    Rng rng(404);
    for (int i = 0; i < 1000; ++i) {
        double kl = rng.uniform_real() * 50.0;
        long n = 1 + static_cast<long>(rng.uniform(100000));
        double delta = 0.01 + rng.uniform_real() * 0.9;
        double c = 0.5 + rng.uniform_real() * 3.0;
        double base = pac_bayes_term(kl, n, delta, c);
        CHECK(pac_bayes_term(kl, n + 1 + static_cast<long>(rng.uniform(1000)), delta, c) < base);
        CHECK(pac_bayes_term(kl + 0.1 + rng.uniform_real(), n, delta, c) > base);
        CHECK(pac_bayes_term(kl, n, std::min(0.999, delta * 1.5), c) < base);
    }
}

TEST_CASE("pac_bayes_term rejects out-of-domain inputs") {
    CHECK_THROWS_AS(pac_bayes_term(-1, 10, 0.1, 1), DomainError);
    CHECK_THROWS_AS(pac_bayes_term(0, 0, 0.1, 1), DomainError);
    CHECK_THROWS_AS(pac_bayes_term(0, 10, 0.0, 1), DomainError);
    CHECK_THROWS_AS(pac_bayes_term(0, 10, 1.0, 1), DomainError);
    CHECK_THROWS_AS(pac_bayes_term(0, 10, 0.1, 0), DomainError);
}

TEST_CASE("tv and kl oracles on uniform ranges") {
    auto p = DiscreteDistribution::uniform(2, 6);
    auto q = DiscreteDistribution::uniform(2, 8);
    CHECK(std::abs(tv_distance(p, q) - 2.0 / 7.0) < 1e-12);
    CHECK(std::abs(kl_distributions(p, q) - std::log(7.0 / 5.0)) < 1e-12);
    CHECK(std::isinf(kl_distributions(q, p)));  // support violation

    CHECK(tv_distance(p, p) == 0.0);
    CHECK(kl_distributions(p, p) == 0.0);
    auto r = DiscreteDistribution::uniform(10, 12);
    CHECK(tv_distance(p, r) == doctest::Approx(1.0).epsilon(1e-15));

    auto ext = extrapolation_terms(p, q, 1.0);
    CHECK(ext.g_ext_tv == doctest::Approx(0.28571).epsilon(1e-4));
    CHECK(ext.g_ext_kl == doctest::Approx(0.41017).epsilon(1e-4));
    auto ext2 = extrapolation_terms(p, q, 3.0);
    CHECK(ext2.g_ext_tv == doctest::Approx(3.0 * ext.g_ext_tv).epsilon(1e-15));
    CHECK(ext2.g_ext_kl == doctest::Approx(3.0 * ext.g_ext_kl).epsilon(1e-15));
}

TEST_CASE("Pinsker holds on 10,000 random distribution pairs") {
    Rng rng(77);
    int finite = 0;
    for (int i = 0; i < 10000; ++i) {
        auto p = random_distribution(rng);
        auto q = random_distribution(rng);
        double tv = tv_distance(p, q);
        double kl = kl_distributions(p, q);
        if (std::isinf(kl)) continue;
        ++finite;
        CHECK(tv <= std::sqrt(kl / 2.0) + 1e-12);
    }
    CHECK(finite > 100);  // the property was actually exercised
}

TEST_CASE("tv_distance is a metric on random triples") {
    Rng rng(91);
    for (int i = 0; i < 2000; ++i) {
        auto p = random_distribution(rng);
        auto q = random_distribution(rng);
        auto r = random_distribution(rng);
        double pq = tv_distance(p, q);
        CHECK(pq == doctest::Approx(tv_distance(q, p)).epsilon(1e-15));
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0 + 1e-15);
        CHECK(tv_distance(p, p) == 0.0);
        CHECK(pq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12);
    }
}

TEST_CASE("kl is nonnegative and zero only at equality") {
    Rng rng(15);
    for (int i = 0; i < 2000; ++i) {
        auto p = random_distribution(rng);
        auto q = random_distribution(rng);
        double kl = kl_distributions(p, q);
        CHECK(kl >= 0.0);
        if (kl < 1e-12 && !std::isinf(kl)) CHECK(tv_distance(p, q) < 1e-5);
    }
}

TEST_CASE("empirical risk clips at C and uses exact constant means") {
    std::vector<double> constant(137, 1.7);
    auto r = empirical_risk(constant, 2.0);
    CHECK(r.risk == 1.7);
    CHECK(r.clip_fraction == 0.0);

    std::vector<double> uniform64(50, std::log(64.0));
    auto u = empirical_risk(uniform64, 2.0 * std::log(64.0));
    CHECK(u.risk == doctest::Approx(std::log(64.0)).epsilon(1e-15));
    CHECK(u.clip_fraction == 0.0);

    auto clipped = empirical_risk(uniform64, 1.0);
    CHECK(clipped.risk == 1.0);
    CHECK(clipped.clip_fraction == 1.0);

    CHECK(empirical_risk({0.42}, 5.0).risk == 0.42);
    CHECK_THROWS_AS(empirical_risk({}, 1.0), EmptySample);
    CHECK_THROWS_AS(empirical_risk({0.1}, 0.0), DomainError);
}

TEST_CASE("weight-space kl proxy") {
    CHECK(kl_weight_proxy(0.0, 1.0) == 0.0);
    CHECK(kl_weight_proxy(4.0, 1.0) == 2.0);  // single scalar differing by 2
    CHECK(kl_weight_proxy(4.0, 2.0) == 0.5);
    CHECK(kl_weight_proxy(9.0, 1.0) > kl_weight_proxy(4.0, 1.0));
    CHECK_THROWS_AS(kl_weight_proxy(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(kl_weight_proxy(-1.0, 1.0), DomainError);
}

TEST_CASE("assembled report adds up exactly and handles null adaptation") {
    auto p = DiscreteDistribution::uniform(2, 8);
    std::vector<double> losses(1000, 1.2);
    auto r = assemble_report(losses, 0.0, p, p, 0.05, 2.0 * std::log(64.0), 1.0);
    CHECK(r.n == 1000);
    CHECK(r.kl_posterior_prior == 0.0);
    CHECK(r.tv == 0.0);
    CHECK(r.g_ext_tv == 0.0);
    CHECK(r.g_ext_kl == 0.0);
    CHECK(r.g_gen == pac_bayes_term(0, 1000, 0.05, 2.0 * std::log(64.0)));
    CHECK(r.total_bound_tv == r.empirical_risk + r.g_gen + r.g_ext_tv);
    CHECK(r.total_bound_kl == r.empirical_risk + r.g_gen + r.g_ext_kl);
    CHECK(r.g_ext_tv <= r.g_ext_kl);
    CHECK(r.residual_epsilon ==
          doctest::Approx(r.C * std::sqrt(std::log(1000.0 / 0.05) / 1000.0)).epsilon(1e-15));

    // doubling n strictly shrinks g_gen
    std::vector<double> more(2000, 1.2);
    auto r2 = assemble_report(more, 0.0, p, p, 0.05, r.C, 1.0);
    CHECK(r2.g_gen < r.g_gen);

    // support violation propagates as infinity, flagged not thrown
    auto narrow = DiscreteDistribution::uniform(2, 6);
    auto r3 = assemble_report(losses, 1.0, p, narrow, 0.05, r.C, 1.0);
    CHECK(std::isinf(r3.kl_dist));
    CHECK(std::isinf(r3.g_ext_kl));
    CHECK(std::isinf(r3.total_bound_kl));
    CHECK(std::isfinite(r3.total_bound_tv));
    CHECK(report_json(r3).find("inf") != std::string::npos);
    CHECK(report_json(r3).find("proxy") != std::string::npos);
    CHECK(report_csv(r).substr(0, 2) == "n,");
}

TEST_CASE("histogram to distribution") {
    auto d = DiscreteDistribution::from_histogram({{2, 50}, {3, 50}, {5, 100}});
    d.validate();
    CHECK(d.support == std::vector<int>{2, 3, 5});
    CHECK(d.probs[2] == 0.5);
    CHECK_THROWS_AS(DiscreteDistribution::from_histogram({}), EmptySample);

    DiscreteDistribution bad;
    bad.support = {2, 2};
    bad.probs = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}
