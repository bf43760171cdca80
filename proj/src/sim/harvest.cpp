#include <numeric>

#include "vmimo/sim/sim.hpp"

namespace vmimo::sim {

namespace {

template <class T>
double mean_of(const std::vector<T>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Block {
    double start = 0.0;
    double end = 0.0;
    double frontier = 0.0;
};

}  // namespace

HarvestedStats harvest_statistics(std::span<const PacketTrace> traces) {
    HarvestedStats s;
    for (const auto& tr : traces) {
        s.cluster_sizes.insert(s.cluster_sizes.end(), tr.cluster_sizes.begin(),
                               tr.cluster_sizes.end());
        for (const auto& g : tr.gaps) {
            ++s.gaps_total;
            if (g.outcome == GapOutcome::blocked) {
                s.unbridged_gaps.push_back(g.length);
            } else {
                ++s.gaps_bridged;
            }
        }
        std::vector<Block> blocks;
        for (const auto& e : tr.events) {
            if (e.kind == EventKind::block_start) {
                blocks.push_back({e.time, e.time, e.frontier});
            } else if (e.kind == EventKind::block_end && !blocks.empty()) {
                blocks.back().end = e.time;
                s.blocking_durations.push_back(e.time - blocks.back().start);
            }
        }
        // A cycle runs from one block-start to the next.
        for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
            Cycle c;
            c.distance = blocks[i + 1].frontier - blocks[i].frontier;
            c.wait = blocks[i].end - blocks[i].start;
            c.transmit = blocks[i + 1].start - blocks[i].end;
            s.cycles.push_back(c);
        }
    }
    if (s.gaps_total > 0) {
        s.bridged_fraction = static_cast<double>(s.gaps_bridged) / static_cast<double>(s.gaps_total);
    }
    s.mean_unbridged_gap = mean_of(s.unbridged_gaps);
    s.mean_blocking = mean_of(s.blocking_durations);
    double d = 0.0, tt = 0.0;
    for (const auto& c : s.cycles) {
        d += c.distance;
        tt += c.transmit;
    }
    if (!s.cycles.empty()) {
        s.mean_cycle_distance = d / static_cast<double>(s.cycles.size());
        s.mean_cycle_transmit = tt / static_cast<double>(s.cycles.size());
    }
    return s;
}

}  // namespace vmimo::sim
