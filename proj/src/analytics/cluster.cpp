#include <cmath>

#include "series_detail.hpp"
#include "vmimo/errors.hpp"

namespace vmimo::analytics {

void TrafficConfig::validate() const {
    if (!(std::isfinite(lambda) && lambda > 0.0)) throw DomainError("traffic: lambda must be > 0");
    if (!(std::isfinite(v) && v > 0.0)) throw DomainError("traffic: v must be > 0");
}

void ProtocolConfig::validate() const {
    if (!(std::isfinite(tau) && tau > 0.0)) throw DomainError("protocol: tau must be > 0");
}

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::normal: return "normal";
        case Regime::fully_connected: return "fully_connected";
        case Regime::divergent_blocking: return "divergent_blocking";
        case Regime::outage_saturated: return "outage_saturated";
    }
    return "unknown";
}

double cluster_size_pmf(double lambda, double r, std::int64_t k) {
    if (k < 1) throw DomainError("cluster_size_pmf: k must be >= 1");
    if (!(lambda > 0.0) || !(r > 0.0)) throw DomainError("cluster_size_pmf: lambda, r must be > 0");
    const double q = detail::link_prob(lambda, r);
    return std::exp(-lambda * r + static_cast<double>(k - 1) * std::log(q));
}

double cluster_size_cdf(double lambda, double r, std::int64_t n) {
    if (n < 0) throw DomainError("cluster_size_cdf: n must be >= 0");
    if (!(lambda > 0.0) || !(r > 0.0)) throw DomainError("cluster_size_cdf: lambda, r must be > 0");
    if (n == 0) return 0.0;
    const double q = detail::link_prob(lambda, r);
    return -std::expm1(static_cast<double>(n) * std::log(q));
}

}  // namespace vmimo::analytics
