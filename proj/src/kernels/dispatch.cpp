#include <cstdlib>
#include <string>

#include "vmimo/kernels/kernels.hpp"

namespace vmimo::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return detail::avx2_compiled() && __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa chosen = [] {
        if (const char* env = std::getenv("VMIMO_ISA")) {
            if (std::string(env) == "scalar") return Isa::scalar;
        }
        return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    }();
    return chosen;
}

std::size_t selection_outage_count(Isa isa, const FadingBlock& block, double offset,
                                   double threshold) {
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
        return detail::selection_outage_count_avx2(block, offset, threshold);
    }
    return detail::selection_outage_count_scalar(block, offset, threshold);
}

std::size_t selection_outage_count(const FadingBlock& block, double offset, double threshold) {
    return selection_outage_count(active_isa(), block, offset, threshold);
}

void gap_exceeds(Isa isa, std::span<const double> positions, double limit,
                 std::span<std::uint8_t> out) {
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
        detail::gap_exceeds_avx2(positions, limit, out);
    } else {
        detail::gap_exceeds_scalar(positions, limit, out);
    }
}

void gap_exceeds(std::span<const double> positions, double limit, std::span<std::uint8_t> out) {
    gap_exceeds(active_isa(), positions, limit, out);
}

}  // namespace vmimo::kernels
