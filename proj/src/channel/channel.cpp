#include "vmimo/channel/channel.hpp"

#include <cmath>
#include <string>

#include "vmimo/errors.hpp"
#include "vmimo/numerics/special.hpp"

namespace vmimo::channel {

using numerics::inverse_normal_cdf;

void ChannelConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw DomainError("channel: " + msg);
    };
    require(std::isfinite(K) && K > 0.0, "K must be > 0");
    require(delta >= 2.0 && delta <= 4.0, "delta must lie in [2, 4]");
    require(std::isfinite(P_t) && P_t > 0.0, "P_t must be > 0");
    require(std::isfinite(P_min) && P_min > 0.0, "P_min must be > 0");
    require(P_out_target > 0.0 && P_out_target < 1.0, "P_out must lie in (0, 1)");
    require(std::isfinite(N0) && N0 > 0.0, "N0 must be > 0");
}

ChannelConfig ChannelConfig::with_range(double range) const {
    if (!(range > 0.0) || !std::isfinite(range)) throw DomainError("channel: range must be > 0");
    ChannelConfig out = *this;
    const double current = single_range(*this);
    // r is proportional to P_t^(1/delta).
    out.P_t = P_t * std::pow(range / current, delta);
    return out;
}

PatnaikParams patnaik_params(int dof, double noncentrality) {
    if (dof < 1) throw DomainError("patnaik_params: dof must be >= 1");
    if (!(noncentrality >= 0.0)) throw DomainError("patnaik_params: noncentrality must be >= 0");
    const double r = dof + noncentrality;
    const double b = noncentrality / r;
    const double V = (2.0 / 9.0) * (1.0 + b) / r;
    return {1.0 - V, V};
}

PatnaikParams single_link_params(const ChannelConfig& cfg) {
    return patnaik_params(2, 1.0 / cfg.sigma_sq());
}

PatnaikParams dual_link_params(const ChannelConfig& cfg) {
    return patnaik_params(4, 2.0 / cfg.sigma_sq());
}

namespace {

double cube_factor(const PatnaikParams& pp, double p) {
    const double c = std::sqrt(pp.V) * inverse_normal_cdf(p) + pp.M;
    if (!(c > 0.0)) {
        throw ModelDomainError("target outage unreachable under normal approximation");
    }
    return c * c * c;
}

// Shared form: [power_scale * P0 (2 sigma^2 + 1) c^3 / P_min]^(1/delta).
double range_from(const ChannelConfig& cfg, double power_scale, const PatnaikParams& pp,
                  double p) {
    cfg.validate();
    const double s2 = cfg.sigma_sq();
    const double base = power_scale * cfg.P0() * s2 * (2.0 + 1.0 / s2) * cube_factor(pp, p) / cfg.P_min;
    return std::pow(base, 1.0 / cfg.delta);
}

double per_receiver_target(const ChannelConfig& cfg, int n_receivers) {
    if (n_receivers < 1) throw DomainError("n_receivers must be >= 1");
    return std::pow(cfg.P_out_target, 1.0 / n_receivers);
}

}  // namespace

double single_range(const ChannelConfig& cfg) {
    return range_from(cfg, 1.0, single_link_params(cfg), cfg.P_out_target);
}

double mimo_range(const ChannelConfig& cfg, int n_receivers) {
    const double p = per_receiver_target(cfg, n_receivers);
    return range_from(cfg, 2.0, dual_link_params(cfg), p);
}

double mimo_range_single_tx(const ChannelConfig& cfg, int n_receivers) {
    const double p = per_receiver_target(cfg, n_receivers);
    return range_from(cfg, 1.0, single_link_params(cfg), p);
}

double range_gain(const ChannelConfig& cfg, int n_receivers) {
    return mimo_range(cfg, n_receivers) / single_range(cfg);
}

double range_gain_single_tx(const ChannelConfig& cfg, int n_receivers) {
    return mimo_range_single_tx(cfg, n_receivers) / single_range(cfg);
}

double analytic_outage(const ChannelConfig& cfg, int n_tx, int n_receivers, double distance) {
    if (n_tx != 1 && n_tx != 2) throw DomainError("n_tx must be 1 or 2");
    if (n_receivers < 1) throw DomainError("n_receivers must be >= 1");
    if (!(distance >= 0.0)) throw DomainError("distance must be >= 0");
    if (distance == 0.0) return 0.0;
    const double s2 = cfg.sigma_sq();
    const PatnaikParams pp = n_tx == 2 ? dual_link_params(cfg) : single_link_params(cfg);
    const double t = cfg.P_min * std::pow(distance, cfg.delta) /
                     (n_tx * cfg.P0() * s2 * (2.0 + 1.0 / s2));
    const double p = numerics::normal_cdf((std::cbrt(t) - pp.M) / std::sqrt(pp.V));
    return std::pow(p, n_receivers);
}

}  // namespace vmimo::channel
