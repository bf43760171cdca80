#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vmimo/channel/range_model.hpp"
#include "vmimo/numerics/rng.hpp"

namespace vmimo::sim {

using channel::RangeModel;

enum class Mode { deterministic, channel_sampled };
std::string_view mode_name(Mode m);

struct SimConfig {
    double road_length = 50'000.0;
    double lambda_e = 0.05;
    double lambda_w = 0.05;
    double v = 30.0;
    double tau = 0.01;
    Mode mode = Mode::deterministic;
    std::uint64_t seed = 1;
    double margin = 1000.0;
    bool zero_outage = false;
    bool singleton_tx_law = false;
    double max_time = 0.0;     // 0: derive from the rule below
    double analytic_vp = 0.0;  // co-moving speed used for the cap; 0 if unknown
    std::shared_ptr<const RangeModel> model;

    void validate() const;
    /// max(1e4 tau hops, 10 dist / v_ref) with v_ref the analytic speed, or
    /// the closing speed 2v when no finite analytic value is available.
    double time_cap() const;
};

/// Positions in the eastbound co-moving frame at `time`. Eastbound vehicles
/// are static; westbound ones drift west at 2v. `west` holds positions at
/// time 0 and is extended eastward on demand while `open_west` is set.
struct HighwaySnapshot {
    std::vector<double> east;
    std::vector<double> west;
    double time = 0.0;
    bool open_west = true;
};

HighwaySnapshot generate_highway(const SimConfig& cfg, numerics::RngStream& rng);

struct Cluster {
    std::size_t first = 0;  // index of the westmost member
    std::size_t last = 0;   // index of the eastmost member
    int size = 0;
    double tail = 0.0;  // westmost position
    double head = 0.0;  // eastmost position
    double mimo_range = 0.0;
};

/// Maximal runs with consecutive gaps <= r. If `model` is given, each
/// cluster carries r F(size); with `singleton_law`, size-1 clusters use the
/// single-transmitter gain instead.
std::vector<Cluster> partition_clusters(std::span<const double> positions, double r,
                                        const RangeModel* model = nullptr,
                                        bool singleton_law = false);

enum class EventKind { hop, relay, block_start, block_end, retransmit };
std::string_view event_name(EventKind k);

struct TraceEvent {
    double time = 0.0;
    double frontier = 0.0;
    EventKind kind = EventKind::hop;
};

enum class GapOutcome { intra, direct, relay_immediate, blocked };

/// One inter-vehicle gap the packet crossed (or stopped at).
struct GapEncounter {
    double length = 0.0;
    int n_tx = 0;
    int n_rx = 0;
    GapOutcome outcome = GapOutcome::intra;
};

struct PacketTrace {
    std::vector<TraceEvent> events;
    std::vector<GapEncounter> gaps;
    std::vector<int> cluster_sizes;  // eastbound clusters met, in order
    double source_pos = 0.0;
    double dest_pos = 0.0;
    double arrival_time = 0.0;
    double time_cap = 0.0;
    bool censored = false;
};

/// A westbound cluster as seen at time 0.
struct WestCluster {
    double lo = 0.0;
    double hi = 0.0;
    int size = 0;
};

/// Earliest t >= now at which some member of `w` is within `ra` of the
/// frontier head `h` and some member is within `rb` of the next cluster's
/// tail `c`, members drifting west at `closing` m/s. Members must be spaced
/// no more than 2 min(ra, rb) apart.
std::optional<double> relay_window_start(const WestCluster& w, double h, double c, double ra,
                                         double rb, double closing, double now);

PacketTrace propagate(const SimConfig& cfg, HighwaySnapshot& snapshot, numerics::RngStream& rng);

/// Fresh highway plus propagation on stream `replicate` of cfg.seed.
PacketTrace run_replicate(const SimConfig& cfg, std::uint64_t replicate);

struct ReplicateRecord {
    std::uint64_t replicate = 0;
    double ips = 0.0;
    double arrival_time = 0.0;
    bool censored = false;
};

struct IpsEstimate {
    double mean = 0.0;  // co-moving frame
    double mean_ground = 0.0;
    double std_error = 0.0;
    double censoring_rate = 0.0;
    std::size_t used = 0;
    std::vector<ReplicateRecord> records;
};

/// Throws EstimationError if every replicate is censored.
IpsEstimate measure_ips(const SimConfig& cfg, std::size_t replicates,
                        std::vector<PacketTrace>* keep_traces = nullptr);

struct Cycle {
    double distance = 0.0;
    double wait = 0.0;
    double transmit = 0.0;
};

struct HarvestedStats {
    std::vector<int> cluster_sizes;
    std::vector<double> unbridged_gaps;
    std::vector<double> blocking_durations;
    std::vector<Cycle> cycles;
    std::size_t gaps_total = 0;
    std::size_t gaps_bridged = 0;
    double bridged_fraction = 0.0;
    double mean_unbridged_gap = 0.0;
    double mean_blocking = 0.0;
    double mean_cycle_distance = 0.0;
    double mean_cycle_transmit = 0.0;
};

HarvestedStats harvest_statistics(std::span<const PacketTrace> traces);

}  // namespace vmimo::sim
