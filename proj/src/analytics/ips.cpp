#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "series_detail.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/numerics/quadrature.hpp"

namespace vmimo::analytics {

namespace {

// Number of leading cluster sizes that carry all but ~1e-13 of the mass,
// never past the cap: sizes from the cap up share one gain.
int mass_horizon(double log_q, int cap) {
    const double k = std::ceil(std::log(1e-13) / log_q) + 1.0;
    return k < cap ? static_cast<int>(k) : cap;
}

}  // namespace

double bridge_probability(const RangeModel& model, const TrafficConfig& traffic) {
    traffic.validate();
    const double lambda = traffic.lambda;
    const double r = model.r();
    const double log_q = detail::log_link_prob(lambda, r);
    const int kmax = mass_horizon(log_q, model.cap());

    std::vector<double> pn(kmax + 1), miss(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
        pn[k] = std::exp(-lambda * r + (k - 1) * log_q);
        miss[k] = std::exp(-lambda * r * model.gain(k));
    }
    if (kmax == model.cap()) pn[kmax] = std::exp((kmax - 1) * log_q);  // P(N >= cap)
    double one_hop = 0.0;
    for (int ne = 1; ne <= kmax; ++ne) one_hop += (1.0 - miss[ne]) * pn[ne];
    double two_hop = 0.0;
    for (int nw = 1; nw <= kmax; ++nw) {
        double row = 0.0;
        for (int ne = 1; ne <= kmax; ++ne) row += (1.0 - miss[nw] * miss[ne]) * pn[ne];
        two_hop += row * pn[nw];
    }
    return 0.5 * one_hop + 0.5 * two_hop;
}

double expected_forward_distance(const RangeModel& model, const TrafficConfig& traffic) {
    const double p_b = bridge_probability(model, traffic);
    const double open = 1.0 - p_b;
    if (!(open > 1e-15)) {
        throw ModelDomainError("expected_forward_distance: every gap bridged (fully connected)");
    }
    return 1.0 / (traffic.lambda * open);
}

double mean_hop_outage(const RangeModel& model, const TrafficConfig& traffic) {
    traffic.validate();
    const double lambda = traffic.lambda;
    const double r = model.r();
    const auto& cfg = model.config();
    const int n_tx = model.cooperative() ? 2 : 1;

    numerics::Quadrature quad;
    quad.relative_tolerance = 1e-9;
    quad.absolute_tolerance = 1e-15;
    std::vector<double> memo(static_cast<std::size_t>(model.cap()) + 1, -1.0);
    auto conditional = [&](std::int64_t k) {
        const int kk = static_cast<int>(std::min<std::int64_t>(k, model.cap()));
        if (memo[kk] >= 0.0) return memo[kk];
        const int n_rx = model.cooperative() ? kk : 1;
        const double reach = r * model.gain(kk);
        const double num = numerics::integrate(
            [&](double i) {
                return channel::analytic_outage(cfg, n_tx, n_rx, i) * lambda * std::exp(-lambda * i);
            },
            0.0, reach, quad);
        memo[kk] = num / -std::expm1(-lambda * reach);
        return memo[kk];
    };
    return detail::cluster_average(lambda, r, model.cap(), 1.0, conditional).sum;
}

double transmission_time_from_outage(double mean_outage, const ProtocolConfig& protocol) {
    protocol.validate();
    if (!(mean_outage >= 0.0) || !(mean_outage < 1.0)) {
        throw ModelDomainError("expected_transmission_time: mean outage must lie in [0, 1)");
    }
    return 1.5 * protocol.tau / (1.0 - mean_outage);
}

double expected_transmission_time(const RangeModel& model, const TrafficConfig& traffic,
                                  const ProtocolConfig& protocol) {
    return transmission_time_from_outage(mean_hop_outage(model, traffic), protocol);
}

IpsBreakdown analytic_ips(const RangeModel& model, const TrafficConfig& traffic,
                          const ProtocolConfig& protocol) {
    traffic.validate();
    protocol.validate();
    IpsBreakdown out;
    out.e_ge = expected_unbridged_gap(model, traffic);
    out.p_b = bridge_probability(model, traffic);
    out.mean_outage = mean_hop_outage(model, traffic);

    if (!(out.mean_outage < 1.0)) {
        out.regime = Regime::outage_saturated;
        out.e_tt = std::numeric_limits<double>::infinity();
    } else {
        out.e_tt = transmission_time_from_outage(out.mean_outage, protocol);
    }

    if (!(1.0 - out.p_b > 1e-15)) {
        // No gap ever blocks; the packet moves one cluster-head spacing,
        // E(N)/lambda, per transmission.
        out.regime = Regime::fully_connected;
        out.e_tw = 0.0;
        out.e_d = std::exp(traffic.lambda * model.r()) / traffic.lambda;
    } else {
        out.e_d = 1.0 / (traffic.lambda * (1.0 - out.p_b));
        const BlockingTime bt = expected_blocking_time_detail(model, traffic);
        out.e_tw = bt.value;
        out.cap_degraded = bt.cap_degraded;
        if (bt.divergent && out.regime == Regime::normal) out.regime = Regime::divergent_blocking;
    }

    const double total = out.e_tw + out.e_tt;
    out.v_p = std::isfinite(total) ? out.e_d / total : 0.0;
    out.v_p_ground = out.v_p + traffic.v;
    return out;
}

}  // namespace vmimo::analytics
