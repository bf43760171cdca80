#include <cmath>
#include <vector>

#include "vmimo/channel/channel.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/kernels/kernels.hpp"

namespace vmimo::channel {

OutageEstimate mc_outage(const ChannelConfig& cfg, int n_tx, int n_receivers, double distance,
                         numerics::RngStream& rng, std::size_t samples) {
    cfg.validate();
    if (n_tx != 1 && n_tx != 2) throw DomainError("mc_outage: n_tx must be 1 or 2");
    if (n_receivers < 1) throw DomainError("mc_outage: n_receivers must be >= 1");
    if (!(distance >= 0.0)) throw DomainError("mc_outage: distance must be >= 0");
    if (samples < 10'000) throw DomainError("mc_outage: need at least 1e4 samples");

    // psi = 1 + sigma (a + j b), so |psi|^2 / sigma^2 = (a + sqrt K)^2 + b^2.
    // Outage when P0 d^-delta sum|psi|^2 < P_min on every receiver.
    const double offset = std::sqrt(cfg.K);
    const double threshold = cfg.P_min * std::pow(distance, cfg.delta) / (cfg.P0() * cfg.sigma_sq());

    constexpr std::size_t kBlock = 4096;
    const std::size_t links = static_cast<std::size_t>(n_receivers) * n_tx;
    std::vector<double> re(links * kBlock);
    std::vector<double> im(links * kBlock);

    std::size_t outages = 0;
    for (std::size_t done = 0; done < samples;) {
        const std::size_t n = std::min(kBlock, samples - done);
        for (std::size_t l = 0; l < links; ++l) {
            for (std::size_t d = 0; d < n; ++d) {
                re[l * n + d] = rng.normal();
                im[l * n + d] = rng.normal();
            }
        }
        kernels::FadingBlock block{std::span<const double>(re.data(), links * n),
                                   std::span<const double>(im.data(), links * n), n,
                                   n_receivers, n_tx};
        outages += kernels::selection_outage_count(block, offset, threshold);
        done += n;
    }
    OutageEstimate est;
    est.samples = samples;
    est.outages = outages;
    est.p = static_cast<double>(outages) / static_cast<double>(samples);
    est.std_error = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(samples));
    return est;
}

}  // namespace vmimo::channel
