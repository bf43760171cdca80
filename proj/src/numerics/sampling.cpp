#include "vmimo/numerics/sampling.hpp"

#include <cmath>

#include "vmimo/errors.hpp"

namespace vmimo::numerics {

double sample_exponential(RngStream& rng, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("sample_exponential: rate must be positive");
    }
    return -std::log1p(-rng.uniform()) / rate;
}

double sample_noncentral_chisq(RngStream& rng, int dof, double noncentrality) {
    if (dof < 1) throw DomainError("sample_noncentral_chisq: dof must be >= 1");
    if (!(noncentrality >= 0.0)) {
        throw DomainError("sample_noncentral_chisq: noncentrality must be >= 0");
    }
    const double z0 = rng.normal() + std::sqrt(noncentrality);
    double sum = z0 * z0;
    for (int i = 1; i < dof; ++i) {
        const double z = rng.normal();
        sum += z * z;
    }
    return sum;
}

}  // namespace vmimo::numerics
