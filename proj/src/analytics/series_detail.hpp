#pragma once

#include <cmath>
#include <cstdint>

#include "vmimo/analytics/analytics.hpp"
#include "vmimo/numerics/series.hpp"

namespace vmimo::analytics::detail {

/// q = 1 - exp(-lambda r): probability that the next same-direction gap is
/// within range, i.e. P(N > k) = q^k.
inline double link_prob(double lambda, double r) { return -std::expm1(-lambda * r); }

/// log q, kept nonzero when q rounds to 1.
inline double log_link_prob(double lambda, double r) { return std::log1p(-std::exp(-lambda * r)); }

/// sum_k P_N(k) g(k) where |g| <= g_max and g(k) = g(cap) for k >= cap.
/// Sizes from the cap up are one term with mass P(N >= cap) = q^(cap-1), so
/// the series ends there even when q is within rounding of 1.
template <class G>
numerics::SeriesSum cluster_average(double lambda, double r, int cap, double g_max, G&& g,
                                    double eps = numerics::kDefaultSeriesEps) {
    const double log_q = log_link_prob(lambda, r);
    const double p1 = std::exp(-lambda * r);
    return numerics::truncate_geometric_series(
        [&](std::int64_t k) {
            if (k > cap) return 0.0;
            const double mass = k == cap ? std::exp((k - 1) * log_q) : p1 * std::exp((k - 1) * log_q);
            return mass * g(k);
        },
        [&](std::int64_t k) { return k >= cap ? 0.0 : std::exp(k * log_q) * g_max; }, eps);
}

}  // namespace vmimo::analytics::detail
