#include <algorithm>
#include <cmath>
#include <cstdint>

#include "vmimo/errors.hpp"
#include "vmimo/kernels/kernels.hpp"
#include "vmimo/numerics/sampling.hpp"
#include "vmimo/sim/sim.hpp"

namespace vmimo::sim {

std::string_view mode_name(Mode m) {
    return m == Mode::deterministic ? "deterministic" : "channel-sampled";
}

std::string_view event_name(EventKind k) {
    switch (k) {
        case EventKind::hop: return "hop";
        case EventKind::relay: return "relay";
        case EventKind::block_start: return "block-start";
        case EventKind::block_end: return "block-end";
        case EventKind::retransmit: return "retransmit";
    }
    return "unknown";
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw DomainError(std::string("sim: ") + msg);
    };
    require(model != nullptr, "range model missing");
    require(lambda_e > 0.0 && lambda_w >= 0.0, "intensities must be positive");
    require(v > 0.0 && tau > 0.0, "v and tau must be > 0");
    require(margin >= 0.0 && 2.0 * margin < road_length, "margins leave no road");
    require(road_length * lambda_e >= 1000.0, "road must span at least 1000 mean gaps");
    require(max_time >= 0.0, "max_time must be >= 0");
}

double SimConfig::time_cap() const {
    if (max_time > 0.0) return max_time;
    const double dist = road_length - 2.0 * margin;
    const double hops = dist * lambda_e * std::exp(-lambda_e * model->r()) + 1.0;
    const double v_ref = (analytic_vp > 0.0 && std::isfinite(analytic_vp)) ? analytic_vp : 2.0 * v;
    return std::max(1e4 * tau * hops, 10.0 * dist / v_ref);
}

namespace {

std::vector<double> poisson_line(double lambda, double from, double to, numerics::RngStream& rng) {
    std::vector<double> out;
    if (lambda <= 0.0) return out;
    out.reserve(static_cast<std::size_t>((to - from) * lambda * 1.1) + 16);
    double x = from + numerics::sample_exponential(rng, lambda);
    while (x <= to) {
        out.push_back(x);
        x += numerics::sample_exponential(rng, lambda);
    }
    return out;
}

}  // namespace

HighwaySnapshot generate_highway(const SimConfig& cfg, numerics::RngStream& rng) {
    cfg.validate();
    HighwaySnapshot snap;
    snap.east = poisson_line(cfg.lambda_e, 0.0, cfg.road_length, rng);
    snap.west = poisson_line(cfg.lambda_w, 0.0, cfg.road_length, rng);
    snap.open_west = cfg.lambda_w > 0.0;
    return snap;
}

std::vector<Cluster> partition_clusters(std::span<const double> positions, double r,
                                        const RangeModel* model, bool singleton_law) {
    std::vector<Cluster> out;
    if (positions.empty()) return out;
    std::vector<std::uint8_t> breaks(positions.size() - 1);
    kernels::gap_exceeds(positions, r, breaks);

    auto close = [&](std::size_t first, std::size_t last) {
        Cluster c;
        c.first = first;
        c.last = last;
        c.size = static_cast<int>(last - first + 1);
        c.tail = positions[first];
        c.head = positions[last];
        if (model) {
            const double g = (singleton_law && c.size == 1) ? model->gain_single_tx(1)
                                                            : model->gain(c.size);
            c.mimo_range = model->r() * g;
        }
        out.push_back(c);
    };
    std::size_t first = 0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (breaks[i]) {
            close(first, i);
            first = i + 1;
        }
    }
    close(first, positions.size() - 1);
    return out;
}

std::optional<double> relay_window_start(const WestCluster& w, double h, double c, double ra,
                                         double rb, double closing, double now) {
    // Member p drifts as p - closing t, so it is within `ra` of h for
    // t in [p - h - ra, p - h + ra] / closing; the members' windows overlap
    // and merge into one interval per condition.
    const double a_start = (w.lo - h - ra) / closing;
    const double a_end = (w.hi - h + ra) / closing;
    const double b_start = (w.lo - c - rb) / closing;
    const double b_end = (w.hi - c + rb) / closing;
    const double s = std::max({a_start, b_start, now});
    const double e = std::min(a_end, b_end);
    if (s <= e) return s;
    return std::nullopt;
}

}  // namespace vmimo::sim
