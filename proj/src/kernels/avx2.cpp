#include "vmimo/kernels/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace vmimo::kernels::detail {

#if defined(__AVX2__)

bool avx2_compiled() { return true; }

std::size_t selection_outage_count_avx2(const FadingBlock& block, double offset,
                                        double threshold) {
    const std::size_t n = block.draws;
    const __m256d off = _mm256_set1_pd(offset);
    const __m256d thr = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t d = 0;
    for (; d + 4 <= n; d += 4) {
        __m256d best = _mm256_setzero_pd();
        for (int rx = 0; rx < block.n_rx; ++rx) {
            __m256d acc = _mm256_setzero_pd();
            for (int tx = 0; tx < block.n_tx; ++tx) {
                const std::size_t base = static_cast<std::size_t>(rx * block.n_tx + tx) * n;
                const __m256d t = _mm256_add_pd(_mm256_loadu_pd(&block.inphase[base + d]), off);
                const __m256d q = _mm256_loadu_pd(&block.quadrature[base + d]);
                acc = _mm256_add_pd(acc, _mm256_add_pd(_mm256_mul_pd(t, t), _mm256_mul_pd(q, q)));
            }
            // Same select rule as the scalar path: keep best unless acc > best.
            const __m256d gt = _mm256_cmp_pd(acc, best, _CMP_GT_OQ);
            best = _mm256_blendv_pd(best, acc, gt);
        }
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(best, thr, _CMP_LT_OQ));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    if (d < n) {
        // Tail: run the reference loop on the remaining draws.
        for (; d < n; ++d) {
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
    }
    return count;
}

void gap_exceeds_avx2(std::span<const double> positions, double limit,
                      std::span<std::uint8_t> out) {
    const std::size_t gaps = positions.empty() ? 0 : positions.size() - 1;
    const __m256d lim = _mm256_set1_pd(limit);
    std::size_t i = 0;
    for (; i + 4 <= gaps; i += 4) {
        const __m256d lo = _mm256_loadu_pd(&positions[i]);
        const __m256d hi = _mm256_loadu_pd(&positions[i + 1]);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_sub_pd(hi, lo), lim, _CMP_GT_OQ));
        out[i] = mask & 1;
        out[i + 1] = (mask >> 1) & 1;
        out[i + 2] = (mask >> 2) & 1;
        out[i + 3] = (mask >> 3) & 1;
    }
    for (; i < gaps; ++i) {
        out[i] = (positions[i + 1] - positions[i]) > limit ? 1 : 0;
    }
}

#else

bool avx2_compiled() { return false; }

std::size_t selection_outage_count_avx2(const FadingBlock& block, double offset,
                                        double threshold) {
    return selection_outage_count_scalar(block, offset, threshold);
}

void gap_exceeds_avx2(std::span<const double> positions, double limit,
                      std::span<std::uint8_t> out) {
    gap_exceeds_scalar(positions, limit, out);
}

#endif

}  // namespace vmimo::kernels::detail
