#include "vmimo/kernels/kernels.hpp"

namespace vmimo::kernels::detail {

std::size_t selection_outage_count_scalar(const FadingBlock& block, double offset,
                                          double threshold) {
    const std::size_t n = block.draws;
    std::size_t count = 0;
    for (std::size_t d = 0; d < n; ++d) {
        double best = 0.0;
        for (int rx = 0; rx < block.n_rx; ++rx) {
            double acc = 0.0;
            for (int tx = 0; tx < block.n_tx; ++tx) {
                const std::size_t base = static_cast<std::size_t>(rx * block.n_tx + tx) * n;
                const double t = block.inphase[base + d] + offset;
                const double q = block.quadrature[base + d];
                acc = acc + (t * t + q * q);
            }
            best = acc > best ? acc : best;
        }
        count += best < threshold ? 1 : 0;
    }
    return count;
}

void gap_exceeds_scalar(std::span<const double> positions, double limit,
                        std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        out[i] = (positions[i + 1] - positions[i]) > limit ? 1 : 0;
    }
}

}  // namespace vmimo::kernels::detail
