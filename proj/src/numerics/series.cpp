#include "vmimo/numerics/series.hpp"

#include "vmimo/errors.hpp"

namespace vmimo::numerics {

SeriesSum truncate_geometric_series(const std::function<double(std::int64_t)>& term,
                                    const std::function<double(std::int64_t)>& tail_bound,
                                    double eps) {
    SeriesSum out;
    for (std::int64_t k = 1; k <= kSeriesHardCap; ++k) {
        out.sum += term(k);
        out.k_max = k;
        if (tail_bound(k) <= eps) return out;
    }
    throw NumericError("truncate_geometric_series: tail bound did not fall below eps", out.sum);
}

}  // namespace vmimo::numerics
