#include <algorithm>
#include <cmath>
#include <limits>

#include "series_detail.hpp"
#include "vmimo/errors.hpp"

namespace vmimo::analytics {

double bridge_laplace(const RangeModel& model, const TrafficConfig& traffic, double theta,
                      double gap, int n_rx) {
    traffic.validate();
    if (!(theta >= 0.0)) throw DomainError("bridge_laplace: theta must be >= 0");
    const auto n0 = model.min_bridge_cluster(n_rx, gap);
    if (n0.at_cap) throw ModelDomainError("bridge_laplace: gap unbridgeable below the gain cap");
    if (n0.n == 0) return 1.0;
    const double q = detail::link_prob(traffic.lambda, model.r());
    const double tail = std::pow(q, n0.n);  // P(N > n0)
    const double head = -std::expm1(n0.n * std::log(q));
    return tail / (1.0 - head * traffic.lambda / (traffic.lambda + theta));
}

BridgeDistance expected_bridge_distance_detail(const RangeModel& model,
                                               const TrafficConfig& traffic, double gap) {
    traffic.validate();
    if (!(gap >= 0.0)) throw DomainError("expected_bridge_distance: gap must be >= 0");
    const double lambda = traffic.lambda;
    const double r = model.r();
    const double log_q = detail::log_link_prob(lambda, r);

    BridgeDistance out;
    out.log_value = -std::numeric_limits<double>::infinity();
    const auto k0 = model.inv_gain_max(gap / r);
    out.cap_degraded = k0.at_cap;
    // Accumulate log of sum_k P_N(k)/lambda (q^-G - 1) with a running max.
    double log_max = -std::numeric_limits<double>::infinity();
    double scaled = 0.0;
    // When every tabulated size falls short, sizes above the cap (which share
    // F(cap)) fall short too; they enter as one term with mass q^cap.
    const int last = k0.at_cap ? k0.n + 1 : k0.n;
    for (int k = 1; k <= last; ++k) {
        const auto g = model.min_bridge_cluster(std::min(k, model.cap()), gap);
        if (g.n == 0) continue;
        out.cap_degraded = out.cap_degraded || g.at_cap;
        const double log_pn = k > model.cap() ? model.cap() * log_q : -lambda * r + (k - 1) * log_q;
        const double a = -g.n * log_q;  // log q^-G
        const double log_term = log_pn - std::log(lambda) + a + std::log(-std::expm1(-a));
        if (log_term > log_max) {
            scaled = scaled * std::exp(log_max - log_term) + 1.0;
            log_max = log_term;
        } else {
            scaled += std::exp(log_term - log_max);
        }
    }
    if (scaled == 0.0) return out;
    out.log_value = log_max + std::log(scaled);
    out.value = std::exp(out.log_value);
    return out;
}

double expected_bridge_distance(const RangeModel& model, const TrafficConfig& traffic,
                                double gap) {
    return expected_bridge_distance_detail(model, traffic, gap).value;
}

}  // namespace vmimo::analytics
