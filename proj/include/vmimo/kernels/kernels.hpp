#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is picked at runtime from CPUID; VMIMO_ISA=scalar forces the
// reference path. Both paths produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace vmimo::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// Best available ISA, honouring the VMIMO_ISA environment override.
Isa active_isa();

/// Block of fading draws in structure-of-arrays layout: component
/// (rx, tx) of draw d sits at index (rx * n_tx + tx) * draws + d.
struct FadingBlock {
    std::span<const double> inphase;
    std::span<const double> quadrature;
    std::size_t draws = 0;
    int n_rx = 1;
    int n_tx = 1;
};

/// Number of draws whose best receiver, summing sum_tx (i + offset)^2 + q^2,
/// stays below `threshold` (selection-combining outage count).
std::size_t selection_outage_count(const FadingBlock& block, double offset, double threshold);
std::size_t selection_outage_count(Isa isa, const FadingBlock& block, double offset,
                                   double threshold);

/// out[i] = 1 if positions[i + 1] - positions[i] > limit, else 0.
/// `out` must hold positions.size() - 1 entries.
void gap_exceeds(std::span<const double> positions, double limit, std::span<std::uint8_t> out);
void gap_exceeds(Isa isa, std::span<const double> positions, double limit,
                 std::span<std::uint8_t> out);

namespace detail {
std::size_t selection_outage_count_scalar(const FadingBlock& block, double offset,
                                          double threshold);
std::size_t selection_outage_count_avx2(const FadingBlock& block, double offset,
                                        double threshold);
void gap_exceeds_scalar(std::span<const double> positions, double limit,
                        std::span<std::uint8_t> out);
void gap_exceeds_avx2(std::span<const double> positions, double limit,
                      std::span<std::uint8_t> out);
bool avx2_compiled();
}  // namespace detail

}  // namespace vmimo::kernels
