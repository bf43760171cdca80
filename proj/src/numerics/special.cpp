#include "vmimo/numerics/special.hpp"

#include <cmath>
#include <numbers>

#include "vmimo/errors.hpp"

namespace vmimo::numerics {

namespace {

constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                         1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                         6.680131188771972e+01, -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                         -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                         3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

// Rational approximation, valid on (0, 0.5]; relative error ~1.2e-9.
double acklam_lower(double p) {
    if (p < kLowBreak) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
           (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

double quantile_lower(double p) {
    double z = acklam_lower(p);
    const double err = normal_cdf(z) - p;
    z -= err / normal_pdf(z);
    return z;
}

}  // namespace

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("inverse_normal_cdf: p must lie in (0, 1)");
    }
    if (p <= 0.5) return quantile_lower(p);
    return -quantile_lower(1.0 - p);
}

}  // namespace vmimo::numerics
