#include "vmimo/numerics/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vmimo/errors.hpp"

namespace vmimo::numerics {

namespace {

constexpr double kEnvelopeFloor = 1e-14;

QuadratureResult integrate_piece(const std::function<double(double)>& f, double a, double b,
                                 const Quadrature& q, unsigned max_depth) {
    QuadratureResult out;
    if (a == b) return out;
    double error = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, q.relative_tolerance, &error);
    out.error = error;
    return out;
}

}  // namespace

double envelope_cutoff(double lower, double decay_rate) {
    return lower - std::log(kEnvelopeFloor) / decay_rate;
}

QuadratureResult integrate_with_error(const std::function<double(double)>& f, double lower,
                                      double upper, const Quadrature& q,
                                      std::span<const double> breakpoints) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
        throw DomainError("integrate: invalid interval");
    }
    if (std::isinf(upper) && q.decay_rate > 0.0) {
        upper = envelope_cutoff(lower, q.decay_rate);
    }

    std::vector<double> cuts{lower};
    for (double p : breakpoints) {
        if (p > lower && p < upper) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(upper);

    const unsigned max_depth =
        std::max(1u, static_cast<unsigned>(std::bit_width(
                         static_cast<unsigned>(std::max(1, q.max_subdivisions)))));

    // Boost stops each piece once its own estimate is within tolerance, so
    // the summed error can land a hair above the bound; tighten and retry.
    QuadratureResult total;
    double internal = q.relative_tolerance;
    for (int round = 0; round < 3; ++round, internal *= 0.01) {
        Quadrature tighter = q;
        tighter.relative_tolerance = std::max(internal, 1e-15);
        total = {};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const auto piece = integrate_piece(f, cuts[i], cuts[i + 1], tighter, max_depth);
            total.value += piece.value;
            total.error += piece.error;
        }
        const double bound = std::max(q.relative_tolerance * std::abs(total.value),
                                      q.absolute_tolerance);
        if (std::isfinite(total.value) && total.error <= bound) return total;
    }
    throw NumericError("integrate: tolerance not met within max_subdivisions", total.value);
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const Quadrature& q, std::span<const double> breakpoints) {
    return integrate_with_error(f, lower, upper, q, breakpoints).value;
}

}  // namespace vmimo::numerics
