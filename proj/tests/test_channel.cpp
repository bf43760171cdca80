#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vmimo/channel/channel.hpp"
#include "vmimo/channel/range_model.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/numerics/sampling.hpp"
#include "vmimo/numerics/special.hpp"

using namespace vmimo;
using namespace vmimo::channel;

namespace {

ChannelConfig defaults(double range = 25.0) { return ChannelConfig{}.with_range(range); }

// Exact CDF of a noncentral chi-square with even dof: Poisson mixture of
// central laws, each with a finite closed form.
double ncx2_cdf_even(double x, int dof, double nc) {
    double total = 0.0;
    double weight = std::exp(-nc / 2);
    for (int i = 0; i < 400; ++i) {
        if (i > 0) weight *= (nc / 2) / i;
        const int m = dof / 2 + i;
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < m; ++j) sum += (term *= (x / 2) / j);
        total += weight * (1.0 - std::exp(-x / 2) * sum);
    }
    return total;
}


}  // namespace

TEST_CASE("patnaik_params substitution") {
    auto a = patnaik_params(2, 0.0);
    CHECK(a.M == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(a.V == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    auto b = patnaik_params(2, 2.0);
    CHECK(b.M == doctest::Approx(11.0 / 12.0).epsilon(1e-15));
    CHECK(b.V == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    auto c = patnaik_params(4, 20.0);
    const double bb = 20.0 / 24.0;
    CHECK(c.V == doctest::Approx((2.0 / 9.0) * (1 + bb) / 24.0).epsilon(1e-15));
    CHECK(c.M + c.V == doctest::Approx(1.0));
    CHECK(c.V > 0.0);
    CHECK(c.V < c.M);
    CHECK(c.M < 1.0);
    CHECK_THROWS_AS(patnaik_params(2, -1.0), DomainError);
    CHECK_THROWS_AS(patnaik_params(0, 1.0), DomainError);
}

TEST_CASE("cube-root of noncentral chi-square is close to N(M, V)") {
    numerics::RngStream rng(77, 0);
    const int n = 100'000;
    std::vector<double> y(n);
    for (auto& v : y) v = std::cbrt(numerics::sample_noncentral_chisq(rng, 4, 20.0) / 24.0);
    const auto p = patnaik_params(4, 20.0);
    // Samples follow the exact law at the 1% KS level.
    const double ks_exact = oracle::ks_distance(y, [](double t) { return ncx2_cdf_even(24.0 * t * t * t, 4, 20.0); });
    CHECK(ks_exact < 1.63 / std::sqrt(static_cast<double>(n)));
    // The normal law is an approximation: its own sup distance to the exact
    // law is about 0.0105 here.
    const double ks = oracle::ks_distance(y, [&](double t) {
        return numerics::normal_cdf((t - p.M) / std::sqrt(p.V));
    });
    CHECK(ks < 0.02);
}

TEST_CASE("link parameters use noncentrality 1/sigma^2 and 2/sigma^2") {
    ChannelConfig cfg;
    const double s2 = cfg.sigma_sq();
    const auto p1 = single_link_params(cfg);
    const auto p2 = dual_link_params(cfg);
    const double v1 = 4 * s2 * (s2 + 1) / (9 * (2 * s2 + 1) * (2 * s2 + 1));
    const double v2 = 2 * s2 * (s2 + 1) / (9 * (2 * s2 + 1) * (2 * s2 + 1));
    CHECK(p1.V == doctest::Approx(v1).epsilon(1e-14));
    CHECK(p1.M == doctest::Approx(1 - v1).epsilon(1e-14));
    CHECK(p2.V == doctest::Approx(v2).epsilon(1e-14));
    CHECK(p2.M == doctest::Approx(1 - v2).epsilon(1e-14));
}

TEST_CASE("single_range normalisation and scaling") {
    ChannelConfig cfg;
    const auto p1 = single_link_params(cfg);
    const double c = std::sqrt(p1.V) * numerics::inverse_normal_cdf(cfg.P_out_target) + p1.M;
    cfg.P_min = cfg.P0() * cfg.sigma_sq() * (2 + 1 / cfg.sigma_sq()) * c * c * c;
    CHECK(single_range(cfg) == doctest::Approx(1.0).epsilon(1e-13));

    ChannelConfig a = defaults();
    ChannelConfig b = a;
    b.P_t *= 2.0;
    CHECK(single_range(b) / single_range(a) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

    for (double delta : {2.0, 3.0, 4.0}) {
        ChannelConfig x = a;
        x.delta = delta;
        ChannelConfig y = x;
        y.P_t *= 5.0;
        CHECK(single_range(y) / single_range(x) == doctest::Approx(std::pow(5.0, 1 / delta)).epsilon(1e-13));
        ChannelConfig z = x;
        z.P_t *= 7.0;
        z.P_min *= 7.0;
        CHECK(single_range(z) == doctest::Approx(single_range(x)).epsilon(1e-13));
    }
    CHECK(single_range(defaults(25.0)) == doctest::Approx(25.0).epsilon(1e-13));
}

TEST_CASE("unreachable outage target is a model-domain error") {
    ChannelConfig cfg;
    cfg.K = 0.01;
    cfg.P_out_target = 1e-3;
    CHECK_THROWS_AS(single_range(cfg), ModelDomainError);
}

TEST_CASE("invalid channel configs are rejected") {
    ChannelConfig cfg;
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = ChannelConfig{};
    cfg.K = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = ChannelConfig{};
    cfg.P_out_target = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("mimo_range with one receiver and monotonicity") {
    const ChannelConfig cfg = defaults();
    const auto p1 = single_link_params(cfg);
    const auto p2 = dual_link_params(cfg);
    const double z = numerics::inverse_normal_cdf(cfg.P_out_target);
    const double c1 = std::sqrt(p1.V) * z + p1.M;
    const double c2 = std::sqrt(p2.V) * z + p2.M;
    const double expected = std::pow(2 * c2 * c2 * c2 / (c1 * c1 * c1), 1 / cfg.delta);
    CHECK(mimo_range(cfg, 1) / single_range(cfg) == doctest::Approx(expected).epsilon(1e-13));
    double prev = 0.0;
    for (int n = 1; n <= 64; ++n) {
        const double r = mimo_range(cfg, n);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(mimo_range_single_tx(cfg, 1) == doctest::Approx(single_range(cfg)).epsilon(1e-13));
}

TEST_CASE("gain at delta 4 is the square root of gain at delta 2") {
    ChannelConfig a = defaults();
    ChannelConfig b = a;
    b.delta = 4.0;
    for (int n : {1, 2, 5, 64, 1000}) {
        CHECK(range_gain(b, n) == doctest::Approx(std::sqrt(range_gain(a, n))).epsilon(1e-13));
    }
}

TEST_CASE("Monte-Carlo outage agrees with the exact noncentral chi-square law") {
    const ChannelConfig cfg = defaults();
    numerics::RngStream rng(5, 1);
    const double s2 = cfg.sigma_sq();
    for (int n_tx : {1, 2}) {
        for (int n_rx : {1, 3}) {
            const double d = 22.0;
            const double thr = cfg.P_min * std::pow(d, cfg.delta) / (cfg.P0() * s2);
            const double p1 = ncx2_cdf_even(thr, 2 * n_tx, n_tx / s2);
            const double exact = std::pow(p1, n_rx);
            const auto est = mc_outage(cfg, n_tx, n_rx, d, rng, 1'000'000);
            const double se = std::sqrt(exact * (1 - exact) / 1e6);
            CHECK(std::abs(est.p - exact) <= 4 * se);
        }
    }
}

TEST_CASE("Monte-Carlo outage at the single-vehicle range") {
    const ChannelConfig cfg = defaults();
    numerics::RngStream rng(5, 0);
    auto single = mc_outage(cfg, 1, 1, single_range(cfg), rng, 1'000'000);
    MESSAGE("single link outage at r: " << single.p << " +- " << single.std_error);
    CHECK(std::abs(single.p - 0.01) <= 0.15 * 0.01);
}

TEST_CASE("Monte-Carlo outage at the virtual-MIMO ranges") {
    const ChannelConfig cfg = defaults();
    numerics::RngStream rng(5, 2);
    for (int n : {4, 8}) {
        auto est = mc_outage(cfg, 2, n, mimo_range(cfg, n), rng, 1'000'000);
        MESSAGE("N_r=" << n << " outage " << est.p << " +- " << est.std_error);
        CHECK(std::abs(est.p - 0.01) <= 0.15 * 0.01);
    }
}

TEST_CASE("mc_outage edge cases") {
    const ChannelConfig cfg = defaults();
    numerics::RngStream rng(5, 3);
    CHECK(mc_outage(cfg, 2, 3, 0.0, rng, 10'000).p == 0.0);
    CHECK(mc_outage(cfg, 2, 3, 1e-3, rng, 10'000).p == 0.0);
    CHECK_THROWS_AS(mc_outage(cfg, 2, 3, 10.0, rng, 100), DomainError);
    CHECK_THROWS_AS(mc_outage(cfg, 3, 3, 10.0, rng, 10'000), DomainError);
}

TEST_CASE("analytic outage equals the target at the predicted ranges") {
    const ChannelConfig cfg = defaults();
    CHECK(analytic_outage(cfg, 1, 1, single_range(cfg)) == doctest::Approx(0.01).epsilon(1e-10));
    for (int n : {1, 2, 7, 100}) {
        CHECK(analytic_outage(cfg, 2, n, mimo_range(cfg, n)) == doctest::Approx(0.01).epsilon(1e-10));
        CHECK(analytic_outage(cfg, 1, n, mimo_range_single_tx(cfg, n)) == doctest::Approx(0.01).epsilon(1e-10));
    }
    CHECK(analytic_outage(cfg, 2, 4, 0.0) == 0.0);
}

TEST_CASE("RangeModel gain table shape") {
    const RangeModel m(defaults());
    CHECK(m.r() == doctest::Approx(25.0).epsilon(1e-13));
    CHECK(m.gain(0) == 0.0);
    for (int n = 1; n <= m.cap(); ++n) {
        CHECK(m.gain(n) > 1.0);
        if (n > 1) CHECK(m.gain(n) > m.gain(n - 1));
        CHECK(m.gain(n) == doctest::Approx(range_gain(m.config(), n)).epsilon(1e-12));
    }
    for (int n = 4; n <= 4096; n *= 2) {
        CHECK(m.gain(n) - m.gain(n / 2) < m.gain(n / 2) - m.gain(n / 4));
    }
    CHECK(m.gain(100000) == m.gain(m.cap()));
}

TEST_CASE("generalized inverses of F") {
    const RangeModel m(defaults());
    CHECK(m.inv_gain_min(0.5).n == 1);
    CHECK(m.inv_gain_min(m.gain(1)).n == 1);
    CHECK(m.inv_gain_min(m.gain(7)).n == 7);
    CHECK(m.inv_gain_min(0.5 * (m.gain(7) + m.gain(8))).n == 8);
    CHECK(m.inv_gain_max(m.gain(1)).n == 0);
    CHECK(m.inv_gain_max(0.3).n == 0);
    CHECK(m.inv_gain_max(m.gain(5) + 1e-9).n == 5);
    auto far = m.inv_gain_max(1e9);
    CHECK(far.at_cap);
    CHECK(far.n == m.cap());
    auto far_min = m.inv_gain_min(1e9);
    CHECK(far_min.at_cap);

    for (int n = 1; n <= m.cap(); ++n) {
        REQUIRE(m.inv_gain_min(m.gain(n)).n == n);
        REQUIRE(m.inv_gain_max(m.gain(n) + 1e-9).n == n);
    }
    // Scan oracle on off-table points.
    for (double y = 0.5; y < 5.0; y += 0.0137) {
        int lo = 1;
        while (lo <= m.cap() && m.gain(lo) < y) ++lo;
        CHECK(m.inv_gain_min(y).n == lo);
        int hi = 0;
        while (hi + 1 <= m.cap() && m.gain(hi + 1) < y) ++hi;
        CHECK(m.inv_gain_max(y).n == hi);
    }
}

TEST_CASE("min_bridge_cluster") {
    const RangeModel m(defaults());
    const double r = m.r();
    CHECK(m.min_bridge_cluster(2, r * m.gain(2)).n == 0);
    CHECK(m.min_bridge_cluster(2, 0.0).n == 0);
    CHECK(m.min_bridge_cluster(2, r * (m.gain(2) + m.gain(3))).n == 3);
    auto huge = m.min_bridge_cluster(1, r * (m.gain(1) + m.gain(m.cap()) + 1.0));
    CHECK(huge.at_cap);
    CHECK_THROWS_AS(m.min_bridge_cluster(1, -1.0), DomainError);
    // Monotone: non-increasing in n_rx, non-decreasing in gap.
    for (double gap = 0.0; gap < 7 * r; gap += 3.7) {
        for (int n = 1; n < 40; ++n) {
            CHECK(m.min_bridge_cluster(n + 1, gap).n <= m.min_bridge_cluster(n, gap).n);
            CHECK(m.min_bridge_cluster(n, gap + 3.7).n >= m.min_bridge_cluster(n, gap).n);
            // Scan oracle: smallest n with r F(n) + r F(n_rx) >= gap.
            int expect = 0;
            if (gap > r * m.gain(n)) {
                expect = 1;
                while (r * (m.gain(expect) + m.gain(n)) < gap) ++expect;
            }
            CHECK(m.min_bridge_cluster(n, gap).n == expect);
        }
    }
}

TEST_CASE("non-cooperative model has F == 1") {
    const RangeModel m = RangeModel::noncooperative(defaults());
    CHECK(!m.cooperative());
    CHECK(m.gain(1) == 1.0);
    CHECK(m.gain(500) == 1.0);
    CHECK(m.inv_gain_min(1.0).n == 1);
    CHECK(m.inv_gain_min(1.5).at_cap);
    CHECK(m.min_bridge_cluster(3, 1.5 * m.r()).n == 1);
    CHECK(m.min_bridge_cluster(3, 2.5 * m.r()).at_cap);
}
