#pragma once

#include <cstdint>
#include <string_view>

#include "vmimo/channel/range_model.hpp"

namespace vmimo::analytics {

using channel::RangeModel;

struct TrafficConfig {
    double lambda = 0.05;  // vehicles per meter, each direction
    double v = 30.0;       // m/s
    void validate() const;
};

struct ProtocolConfig {
    double tau = 0.01;  // retransmission period, s
    void validate() const;
};

enum class Regime {
    normal,
    fully_connected,     // P_b numerically 1: no blocking, speed set by T_t alone
    divergent_blocking,  // the blocking-time integral does not converge
    outage_saturated,    // mean hop outage >= 1
};

std::string_view regime_name(Regime r);

struct IpsBreakdown {
    double e_d = 0.0;   // m
    double e_tw = 0.0;  // s
    double e_tt = 0.0;  // s
    double p_b = 0.0;
    double e_ge = 0.0;  // m
    double v_p = 0.0;   // m/s, eastbound frame
    double v_p_ground = 0.0;
    double mean_outage = 0.0;
    Regime regime = Regime::normal;
    bool cap_degraded = false;  // some term needed F beyond the gain cap
};

// Cluster sizes -------------------------------------------------------------

double cluster_size_pmf(double lambda, double r, std::int64_t k);
double cluster_size_cdf(double lambda, double r, std::int64_t n);

// Gap bridging --------------------------------------------------------------

/// E[exp(-theta B)] for the westbound distance B travelled until a cluster
/// large enough to bridge `gap` toward a receiving cluster of n_rx arrives.
/// Throws ModelDomainError if no cluster below the gain cap can bridge.
double bridge_laplace(const RangeModel& model, const TrafficConfig& traffic, double theta,
                      double gap, int n_rx);

struct BridgeDistance {
    double value = 0.0;
    double log_value = 0.0;  // log of value, finite even when value overflows
    bool cap_degraded = false;
};

/// Mean westbound distance until a gap of length `gap` is bridged, averaged
/// over the receiving-cluster size.
BridgeDistance expected_bridge_distance_detail(const RangeModel& model,
                                               const TrafficConfig& traffic, double gap);
double expected_bridge_distance(const RangeModel& model, const TrafficConfig& traffic, double gap);

// Unbridged gap -------------------------------------------------------------

double unbridged_gap_pdf(const RangeModel& model, const TrafficConfig& traffic, double x);
double unbridged_gap_cdf(const RangeModel& model, const TrafficConfig& traffic, double x);

/// Mean unbridged gap, evaluated term by term with quadrature and checked
/// against the closed form sum P_N(k) (r F(k) + 1/lambda).
double expected_unbridged_gap(const RangeModel& model, const TrafficConfig& traffic);
double expected_unbridged_gap_closed(const RangeModel& model, const TrafficConfig& traffic);

// Renewal components --------------------------------------------------------

struct BlockingTime {
    double value = 0.0;         // seconds; +inf when divergent
    double integral = 0.0;      // integral of E(B(x)) p_e(x), +inf when divergent
    double log_capped_integral = 0.0;  // log of the integral with G clamped at the cap
    bool divergent = false;
    bool cap_degraded = false;
};

BlockingTime expected_blocking_time_detail(const RangeModel& model, const TrafficConfig& traffic);
double expected_blocking_time(const RangeModel& model, const TrafficConfig& traffic);

/// Integral of E(B(x)) p_e(x) over [0, upper], summed exactly over the
/// intervals on which E(B) is constant. Returned as a log because the
/// terms grow like q^-n. G is clamped at the gain cap.
struct BlockingIntegral {
    double log_value = 0.0;
    double log_cap_share = 0.0;  // log of the part coming from G at the cap
};
BlockingIntegral blocking_integral_closed(const RangeModel& model, const TrafficConfig& traffic,
                                          double upper);

/// Integral of E(B(x)) p_e(x) by adaptive quadrature over the breakpoints of
/// the piecewise-constant E(B). Slow; intended for cross-checking.
double blocking_integral_quadrature(const RangeModel& model, const TrafficConfig& traffic,
                                    double upper);

double bridge_probability(const RangeModel& model, const TrafficConfig& traffic);
double expected_forward_distance(const RangeModel& model, const TrafficConfig& traffic);

/// Mean hop outage sum_k P_N(k) E(P_o | N_r = k), link distance Exp(lambda)
/// truncated to [0, r F(k)].
double mean_hop_outage(const RangeModel& model, const TrafficConfig& traffic);
double expected_transmission_time(const RangeModel& model, const TrafficConfig& traffic,
                                  const ProtocolConfig& protocol);
/// Same, given the mean outage directly.
double transmission_time_from_outage(double mean_outage, const ProtocolConfig& protocol);

IpsBreakdown analytic_ips(const RangeModel& model, const TrafficConfig& traffic,
                          const ProtocolConfig& protocol);

}  // namespace vmimo::analytics
