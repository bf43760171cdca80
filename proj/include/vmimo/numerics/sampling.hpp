#pragma once

#include "vmimo/numerics/rng.hpp"

namespace vmimo::numerics {

/// Exp(rate) by inversion. Throws DomainError for rate <= 0.
double sample_exponential(RngStream& rng, double rate);

/// Non-central chi-square with `dof` degrees of freedom, drawn as the sum of
/// `dof` squared unit-variance normals whose squared means sum to
/// `noncentrality` (all of it placed on the first component).
double sample_noncentral_chisq(RngStream& rng, int dof, double noncentrality);

}  // namespace vmimo::numerics
