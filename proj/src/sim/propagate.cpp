#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "vmimo/channel/channel.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/numerics/sampling.hpp"
#include "vmimo/sim/sim.hpp"

namespace vmimo::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Westbound clusters in time-0 coordinates, built lazily as the search
// moves east. Vehicles are appended to snapshot.west as needed.
class WestTraffic {
public:
    WestTraffic(HighwaySnapshot& snap, double lambda, double r, numerics::RngStream& rng)
        : snap_(snap), lambda_(lambda), r_(r), rng_(rng) {}

    const WestCluster* get(std::size_t i) {
        while (clusters_.size() <= i) {
            if (!build_next()) return nullptr;
        }
        return &clusters_[i];
    }

    std::size_t first_with_hi_at_least(double x) {
        // Clusters are sorted; extend until the last one reaches x.
        while (clusters_.empty() || clusters_.back().hi < x) {
            if (!build_next()) break;
        }
        auto it = std::lower_bound(clusters_.begin(), clusters_.end(), x,
                                   [](const WestCluster& w, double v) { return w.hi < v; });
        return static_cast<std::size_t>(it - clusters_.begin());
    }

private:
    bool have(std::size_t idx) {
        while (snap_.west.size() <= idx) {
            if (!snap_.open_west || lambda_ <= 0.0) return false;
            const double last = snap_.west.empty() ? 0.0 : snap_.west.back();
            snap_.west.push_back(last + numerics::sample_exponential(rng_, lambda_));
        }
        return true;
    }

    bool build_next() {
        if (!have(next_)) return false;
        WestCluster w;
        w.lo = snap_.west[next_];
        std::size_t i = next_;
        while (have(i + 1) && snap_.west[i + 1] - snap_.west[i] <= r_) ++i;
        w.hi = snap_.west[i];
        w.size = static_cast<int>(i - next_ + 1);
        clusters_.push_back(w);
        next_ = i + 1;
        return true;
    }

    HighwaySnapshot& snap_;
    double lambda_;
    double r_;
    numerics::RngStream& rng_;
    std::vector<WestCluster> clusters_;
    std::size_t next_ = 0;
};

struct RelayChoice {
    double start = kInf;
    WestCluster w;
    double ra = 0.0;
    double rb = 0.0;
};

class Propagator {
public:
    Propagator(const SimConfig& cfg, HighwaySnapshot& snap, numerics::RngStream& rng)
        : cfg_(cfg),
          model_(*cfg.model),
          rng_(rng),
          west_(snap, cfg.lambda_w, cfg.model->r(), rng),
          closing_(2.0 * cfg.v),
          ra_max_(cfg.model->r() * cfg.model->gain_upper_bound()) {}

    int n_tx(int tx_size) const {
        if (!model_.cooperative()) return 1;
        return (cfg_.singleton_tx_law && tx_size == 1) ? 1 : 2;
    }
    int n_rx(int rx_size) const { return model_.cooperative() ? rx_size : 1; }
    double reach(int tx_size, int rx_size) const {
        const double g = (cfg_.singleton_tx_law && tx_size == 1) ? model_.gain_single_tx(rx_size)
                                                                 : model_.gain(rx_size);
        return model_.r() * g;
    }

    // Earliest relay through one westbound cluster, from head h to the next
    // cluster's tail c, not before `now` and not after `limit`.
    RelayChoice find_relay(double h, double c, int tx_size, int rx_size, double now,
                           double limit) {
        RelayChoice best;
        std::size_t i = west_.first_with_hi_at_least(h - ra_max_ + closing_ * now);
        for (;; ++i) {
            const WestCluster* w = west_.get(i);
            if (!w) break;
            const double bound = (w->lo - h - ra_max_) / closing_;
            if (bound > best.start || bound > limit) break;
            const double ra = reach(tx_size, w->size);
            const double rb = reach(w->size, rx_size);
            const auto s = relay_window_start(*w, h, c, ra, rb, closing_, now);
            if (s && *s < best.start) {
                best.start = *s;
                best.w = *w;
                best.ra = ra;
                best.rb = rb;
            }
        }
        return best;
    }

    // Number of attempts until success with per-attempt outage p.
    std::int64_t geometric_attempts(double p) {
        if (cfg_.zero_outage || p <= 0.0) return 1;
        if (p >= 1.0) return std::numeric_limits<std::int64_t>::max();
        const double u = 1.0 - rng_.uniform();  // (0, 1]
        return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log(p)));
    }

    bool channel_success(int ntx, int nrx, double d) {
        if (cfg_.zero_outage) return true;
        const auto& ch = model_.config();
        const double offset = std::sqrt(ch.K);
        const double threshold = ch.P_min * std::pow(d, ch.delta) / (ch.P0() * ch.sigma_sq());
        for (int rx = 0; rx < nrx; ++rx) {
            double acc = 0.0;
            for (int tx = 0; tx < ntx; ++tx) {
                const double a = rng_.normal() + offset;
                const double b = rng_.normal();
                acc = acc + (a * a + b * b);
            }
            if (!(acc < threshold)) return true;
        }
        return false;
    }

    // Closest member of w (time-0 coordinates) to point x at time t.
    double nearest(const WestCluster& w, double x, double t) const {
        const double lo = w.lo - closing_ * t;
        const double hi = w.hi - closing_ * t;
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;  // inside the cluster span; members are at most r apart
    }

    PacketTrace run(HighwaySnapshot& snap);

private:
    void add_intra(PacketTrace& tr, const HighwaySnapshot& snap, std::size_t from, std::size_t to,
                   int size) {
        for (std::size_t i = from; i < to; ++i) {
            tr.gaps.push_back({snap.east[i + 1] - snap.east[i], size, size, GapOutcome::intra});
        }
    }

    // Direct hop attempts; returns completion time or +inf past the cap.
    double direct_hop(PacketTrace& tr, double t, double frontier, int ntx, int nrx, double d,
                      double cap) {
        if (cfg_.mode == Mode::deterministic) {
            const double p = cfg_.zero_outage ? 0.0 : channel::analytic_outage(model_.config(), ntx, nrx, d);
            const std::int64_t m = geometric_attempts(p);
            for (std::int64_t j = 1; j < m; ++j) {
                const double tj = t + static_cast<double>(j) * cfg_.tau;
                if (tj > cap) return kInf;
                tr.events.push_back({tj, frontier, EventKind::retransmit});
            }
            return t + static_cast<double>(m) * cfg_.tau;
        }
        for (;;) {
            t += cfg_.tau;
            if (t > cap) return kInf;
            if (channel_success(ntx, nrx, d)) return t;
            tr.events.push_back({t, frontier, EventKind::retransmit});
        }
    }

    const SimConfig& cfg_;
    const RangeModel& model_;
    numerics::RngStream& rng_;
    WestTraffic west_;
    double closing_;
    double ra_max_;
};

PacketTrace Propagator::run(HighwaySnapshot& snap) {
    PacketTrace tr;
    const double r = model_.r();
    const auto clusters = partition_clusters(snap.east, r, &model_, cfg_.singleton_tx_law);
    tr.dest_pos = cfg_.road_length - cfg_.margin;
    tr.time_cap = cfg_.time_cap();
    const double cap = tr.time_cap;

    auto src = std::lower_bound(snap.east.begin(), snap.east.end(), cfg_.margin);
    if (src == snap.east.end()) {
        tr.censored = true;
        return tr;
    }
    const std::size_t src_idx = static_cast<std::size_t>(src - snap.east.begin());
    tr.source_pos = *src;
    std::size_t ci = static_cast<std::size_t>(
        std::upper_bound(clusters.begin(), clusters.end(), src_idx,
                         [](std::size_t i, const Cluster& c) { return i < c.first; }) -
        clusters.begin()) - 1;
    add_intra(tr, snap, src_idx, clusters[ci].last, clusters[ci].size);
    tr.cluster_sizes.push_back(clusters[ci].size);

    double t = 0.0;
    while (clusters[ci].head < tr.dest_pos) {
        if (ci + 1 >= clusters.size()) {
            tr.censored = true;
            break;
        }
        const Cluster& cur = clusters[ci];
        const Cluster& nxt = clusters[ci + 1];
        const double h = cur.head;
        const double c = nxt.tail;
        const double x = c - h;

        double done = kInf;
        if (x <= reach(cur.size, nxt.size) * (1.0 + 1e-12)) {
            tr.gaps.push_back({x, cur.size, nxt.size, GapOutcome::direct});
            done = direct_hop(tr, t, h, n_tx(cur.size), n_rx(nxt.size), x, cap);
            if (done == kInf) {
                tr.censored = true;
                break;
            }
            tr.events.push_back({done, nxt.head, EventKind::hop});
        } else {
            // Wait for a westbound cluster that covers both ends of the gap.
            double now = t;
            bool censored = false;
            double relay_start = t;
            std::vector<TraceEvent> pending;  // retransmissions during the relay
            for (;;) {
                RelayChoice rc = find_relay(h, c, cur.size, nxt.size, now, cap);
                if (rc.start > cap) {
                    censored = true;
                    break;
                }
                if (cfg_.mode == Mode::channel_sampled) {
                    // Attempts happen on the tau grid that started at t.
                    const double steps = std::ceil((rc.start - t) / cfg_.tau - 1e-9);
                    const double tg = t + std::max(0.0, steps) * cfg_.tau;
                    if (tg > rc.start) {
                        RelayChoice again = find_relay(h, c, cur.size, nxt.size, tg, cap);
                        if (again.start != tg) {
                            now = tg;
                            continue;
                        }
                        rc = again;
                    }
                }
                relay_start = rc.start;
                pending.clear();

                const int tx1 = n_tx(cur.size);
                const int rx1 = n_rx(rc.w.size);
                const int tx2 = n_tx(rc.w.size);
                const int rx2 = n_rx(nxt.size);
                PacketTrace scratch;
                if (cfg_.mode == Mode::deterministic) {
                    const double d1 = nearest(rc.w, h, rc.start);
                    const double d2 = nearest(rc.w, c, rc.start);
                    const double t1 = direct_hop(scratch, rc.start, h, tx1, rx1, d1, cap);
                    done = t1 == kInf ? kInf : direct_hop(scratch, t1, h, tx2, rx2, d2, cap);
                    pending = std::move(scratch.events);
                    censored = done == kInf;
                    break;
                }
                // Channel-sampled: each attempt sees the geometry of its own
                // slot; if the window closes first, go back to waiting.
                double ts = rc.start;
                bool on_west = false;
                bool lost = false;
                for (;;) {
                    const double d1 = nearest(rc.w, h, ts);
                    const double d2 = nearest(rc.w, c, ts);
                    if (d1 > rc.ra * (1.0 + 1e-12) || d2 > rc.rb * (1.0 + 1e-12)) {
                        lost = true;
                        break;
                    }
                    const bool ok = on_west ? channel_success(tx2, rx2, d2)
                                            : channel_success(tx1, rx1, d1);
                    ts += cfg_.tau;
                    if (ts > cap) break;
                    if (!ok) {
                        pending.push_back({ts, h, EventKind::retransmit});
                        continue;
                    }
                    if (on_west) {
                        done = ts;
                        break;
                    }
                    on_west = true;
                }
                if (lost) {
                    now = ts + cfg_.tau * 1e-6;
                    continue;
                }
                censored = done == kInf;
                break;
            }
            if (censored) {
                tr.censored = true;
                break;
            }
            const bool blocked = relay_start > t;
            if (blocked) {
                tr.events.push_back({t, h, EventKind::block_start});
                tr.events.push_back({relay_start, h, EventKind::block_end});
            }
            tr.events.insert(tr.events.end(), pending.begin(), pending.end());
            tr.gaps.push_back({x, cur.size, nxt.size,
                               blocked ? GapOutcome::blocked : GapOutcome::relay_immediate});
            tr.events.push_back({done, nxt.head, EventKind::relay});
        }
        t = done;
        ++ci;
        add_intra(tr, snap, clusters[ci].first, clusters[ci].last, clusters[ci].size);
        tr.cluster_sizes.push_back(clusters[ci].size);
    }
    tr.arrival_time = t;
    return tr;
}

}  // namespace

PacketTrace propagate(const SimConfig& cfg, HighwaySnapshot& snapshot, numerics::RngStream& rng) {
    cfg.validate();
    Propagator p(cfg, snapshot, rng);
    return p.run(snapshot);
}

PacketTrace run_replicate(const SimConfig& cfg, std::uint64_t replicate) {
    numerics::RngStream rng(cfg.seed, replicate);
    HighwaySnapshot snap = generate_highway(cfg, rng);
    return propagate(cfg, snap, rng);
}

}  // namespace vmimo::sim
