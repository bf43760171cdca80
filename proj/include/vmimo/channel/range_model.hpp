#pragma once

#include <vector>

#include "vmimo/channel/channel.hpp"

namespace vmimo::channel {

inline constexpr int kDefaultGainCap = 4096;

/// Result of a generalized inverse of F. `at_cap` means the answer would
/// lie beyond the tabulated range; `n` then equals the cap.
struct GainInverse {
    int n = 0;
    bool at_cap = false;
};

/// Single-vehicle range r plus a table of F(1..cap), built eagerly.
/// Immutable after construction and safe to share between threads.
class RangeModel {
public:
    explicit RangeModel(const ChannelConfig& cfg, int cap = kDefaultGainCap);

    /// Same r, but F == 1 everywhere (no cooperation).
    static RangeModel noncooperative(const ChannelConfig& cfg, int cap = kDefaultGainCap);

    const ChannelConfig& config() const { return cfg_; }
    double r() const { return r_; }
    int cap() const { return cap_; }
    bool cooperative() const { return cooperative_; }

    /// F(n) with F(0) = 0. Sizes above the cap are clamped to F(cap).
    double gain(int n) const;
    /// Gain when the transmitting cluster has a single vehicle.
    double gain_single_tx(int n) const;
    double mimo_range(int n) const { return r_ * gain(n); }
    /// F(cap): no cluster can do better.
    double gain_upper_bound() const { return gain(cap_); }

    /// Smallest n >= 1 with F(n) >= y.
    GainInverse inv_gain_min(double y) const;
    /// Largest k >= 0 with F(k) < y.
    GainInverse inv_gain_max(double y) const;
    /// Smallest westbound cluster size n with r F(n) + r F(n_rx) >= gap,
    /// or 0 if the receiving cluster is directly reachable.
    GainInverse min_bridge_cluster(int n_rx, double gap) const;

    const std::vector<double>& gain_table() const { return table_; }

private:
    RangeModel(const ChannelConfig& cfg, int cap, bool cooperative);

    ChannelConfig cfg_;
    double r_ = 0.0;
    int cap_ = 0;
    bool cooperative_ = true;
    std::vector<double> table_;     // table_[n] = F(n), table_[0] = 0
    std::vector<double> single_;    // N_t = 1 law
};

}  // namespace vmimo::channel
