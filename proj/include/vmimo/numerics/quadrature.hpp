#pragma once

#include <functional>
#include <limits>
#include <span>

namespace vmimo::numerics {

struct Quadrature {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 1 << 15;
    /// If set (> 0) and the upper limit is infinite, the range is cut where
    /// exp(-decay_rate * (x - lower)) drops below 1e-14 instead of mapping
    /// [lower, inf) onto a finite interval.
    double decay_rate = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Adaptive Gauss-Kronrod (15 point) integration of `f` over [lower, upper].
/// `breakpoints` are interior points where `f` may be discontinuous; each
/// smooth piece is integrated separately. Throws NumericError (with the
/// partial sum) when the error bound max(rel*|value|, abs) is not met.
QuadratureResult integrate_with_error(const std::function<double(double)>& f, double lower,
                                      double upper, const Quadrature& q,
                                      std::span<const double> breakpoints = {});

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const Quadrature& q, std::span<const double> breakpoints = {});

/// Cut-off used for semi-infinite integrals with an exponential envelope.
double envelope_cutoff(double lower, double decay_rate);

}  // namespace vmimo::numerics
