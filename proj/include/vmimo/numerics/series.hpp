#pragma once

#include <cstdint>
#include <functional>

namespace vmimo::numerics {

inline constexpr double kDefaultSeriesEps = 1e-10;
inline constexpr std::int64_t kSeriesHardCap = 10'000'000;

struct SeriesSum {
    double sum = 0.0;
    std::int64_t k_max = 0;  // last index included
};

/// Sums term(1) + term(2) + ... and stops at the first K with
/// tail_bound(K) <= eps, where tail_bound(K) bounds |sum_{k>K} term(k)|.
/// Throws NumericError if that does not happen within kSeriesHardCap terms.
SeriesSum truncate_geometric_series(const std::function<double(std::int64_t)>& term,
                                    const std::function<double(std::int64_t)>& tail_bound,
                                    double eps = kDefaultSeriesEps);

}  // namespace vmimo::numerics
