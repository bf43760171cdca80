#pragma once

namespace vmimo::numerics {

/// Standard normal CDF, accurate in both tails.
double normal_cdf(double z);

/// Standard normal density.
double normal_pdf(double z);

/// Quantile of the standard normal. Throws DomainError unless 0 < p < 1.
///
/// Acklam's rational approximation followed by one Newton step against the
/// erfc-based CDF. The upper half is computed as -quantile(1 - p), which is
/// exact in binary floating point for p >= 0.5, so both tails keep full
/// relative accuracy.
double inverse_normal_cdf(double p);

}  // namespace vmimo::numerics
