#pragma once

#include <cstddef>

#include "vmimo/numerics/rng.hpp"

namespace vmimo::channel {

/// Radio and fading parameters. Powers in watts, distances in meters.
struct ChannelConfig {
    double K = 10.0;  // Rician factor
    double delta = 2.0;
    double P_t = 1.0;
    double P_min = 1e-3;
    double P_out_target = 0.01;
    double N0 = 1e-13;  // only used for SNR bookkeeping in the MC oracle

    double sigma_sq() const { return 1.0 / K; }
    /// Normalized transmit power K P_t / (K + 1).
    double P0() const { return K * P_t / (K + 1.0); }

    /// Throws DomainError if any invariant is violated.
    void validate() const;

    /// Copy of this config with P_t rescaled so that single_range() == range.
    ChannelConfig with_range(double range) const;
};

struct PatnaikParams {
    double M = 0.0;
    double V = 0.0;
};

/// Mean and variance of the normal law approximating (X / (f + nc))^(1/3)
/// for X ~ noncentral chi-square(f, nc).
PatnaikParams patnaik_params(int dof, double noncentrality);

/// Parameters of the single-link variable |psi|^2 / sigma^2 ~ chi'^2_2(1/sigma^2).
PatnaikParams single_link_params(const ChannelConfig& cfg);
/// Parameters of the two-transmitter variable, chi'^2_4(2/sigma^2).
PatnaikParams dual_link_params(const ChannelConfig& cfg);

double single_range(const ChannelConfig& cfg);
/// Range of a two-vehicle transmitter toward `n_receivers` with selection.
double mimo_range(const ChannelConfig& cfg, int n_receivers);
/// Same with a lone transmitter: no power doubling, single-link parameters.
double mimo_range_single_tx(const ChannelConfig& cfg, int n_receivers);

/// F(N_r) = mimo_range / single_range. Not memoized; see RangeModel.
double range_gain(const ChannelConfig& cfg, int n_receivers);
double range_gain_single_tx(const ChannelConfig& cfg, int n_receivers);

/// Outage under the cube-root normal approximation with every receiver at
/// `distance`: per-receiver outage raised to n_receivers.
double analytic_outage(const ChannelConfig& cfg, int n_tx, int n_receivers, double distance);

struct OutageEstimate {
    double p = 0.0;
    double std_error = 0.0;
    std::size_t outages = 0;
    std::size_t samples = 0;
};

/// Monte-Carlo outage of selection combining over n_receivers links, each
/// the sum of n_tx Rician powers, all at `distance`.
OutageEstimate mc_outage(const ChannelConfig& cfg, int n_tx, int n_receivers, double distance,
                         numerics::RngStream& rng, std::size_t samples);

}  // namespace vmimo::channel
