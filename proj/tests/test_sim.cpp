#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vmimo/analytics/analytics.hpp"
#include "vmimo/channel/channel.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/sim/sim.hpp"

using namespace vmimo;
using namespace vmimo::sim;

namespace {

std::shared_ptr<const RangeModel> model25() {
    static auto m = std::make_shared<const RangeModel>(channel::ChannelConfig{}.with_range(25.0));
    return m;
}

SimConfig base(double lambda = 0.05) {
    SimConfig cfg;
    cfg.model = model25();
    cfg.lambda_e = cfg.lambda_w = lambda;
    return cfg;
}

// Hand layouts: a short road whose nominal density only has to pass validation.
SimConfig hand_config(double road, double margin) {
    SimConfig cfg = base(2000.0 / road);
    cfg.road_length = road;
    cfg.margin = margin;
    cfg.zero_outage = true;
    cfg.max_time = 1e4;
    return cfg;
}

std::vector<std::vector<double>> reference_partition(const std::vector<double>& pos, double r) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        // i starts a cluster iff no earlier vehicle links to it through a chain.
        bool linked = false;
        for (std::size_t j = 0; j < i; ++j) {
            bool chain = true;
            for (std::size_t k = j; k < i; ++k) chain = chain && pos[k + 1] - pos[k] <= r;
            linked = linked || chain;
        }
        if (!linked) out.emplace_back();
        out.back().push_back(pos[i]);
    }
    return out;
}

}  // namespace

TEST_CASE("highway generation") {
    SimConfig cfg = base();
    cfg.road_length = 1e5;
    numerics::RngStream rng(1, 0);
    const auto snap = generate_highway(cfg, rng);
    CHECK(std::abs(static_cast<double>(snap.east.size()) - 5000.0) <= 5 * std::sqrt(5000.0));
    CHECK(std::abs(static_cast<double>(snap.west.size()) - 5000.0) <= 5 * std::sqrt(5000.0));
    CHECK(std::is_sorted(snap.east.begin(), snap.east.end()));
    std::vector<double> gaps;
    for (std::size_t i = 1; i < snap.east.size(); ++i) gaps.push_back(snap.east[i] - snap.east[i - 1]);
    const double ks = oracle::ks_distance(gaps, [](double x) { return -std::expm1(-0.05 * x); });
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(gaps.size())));

    numerics::RngStream a(9, 3), b(9, 3);
    const auto s1 = generate_highway(cfg, a);
    const auto s2 = generate_highway(cfg, b);
    CHECK(s1.east == s2.east);
    CHECK(s1.west == s2.west);

    SimConfig bad = base();
    bad.road_length = 1000.0;
    CHECK_THROWS_AS(generate_highway(bad, rng), DomainError);
}

TEST_CASE("cluster partition") {
    const std::vector<double> pos{0.0, 10.0, 30.0};
    const auto c = partition_clusters(pos, 15.0);
    REQUIRE(c.size() == 2);
    CHECK(c[0].size == 2);
    CHECK(c[0].tail == 0.0);
    CHECK(c[0].head == 10.0);
    CHECK(c[1].size == 1);
    CHECK(c[1].head == 30.0);
    CHECK(partition_clusters(std::vector<double>{}, 15.0).empty());

    const auto m = model25();
    const auto with_range = partition_clusters(pos, 25.0, m.get());
    REQUIRE(with_range.size() == 1);
    CHECK(with_range[0].mimo_range == doctest::Approx(25.0 * m->gain(3)));

    numerics::RngStream rng(4, 0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> p;
        double x = 0.0;
        for (int i = 0; i < 1000; ++i) p.push_back(x += -20.0 * std::log(1.0 - rng.uniform()));
        const auto got = partition_clusters(p, 25.0);
        const auto ref = reference_partition(p, 25.0);
        REQUIRE(got.size() == ref.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(static_cast<std::size_t>(got[i].size) == ref[i].size());
            CHECK(got[i].tail == ref[i].front());
            CHECK(got[i].head == ref[i].back());
        }
        // Each cluster, partitioned again, is a single cluster.
        for (const auto& cl : got) {
            std::span<const double> members(p.data() + cl.first, static_cast<std::size_t>(cl.size));
            CHECK(partition_clusters(members, 25.0).size() == 1);
        }
    }
}

TEST_CASE("cluster sizes on generated highways follow the geometric law") {
    SimConfig cfg = base();
    cfg.road_length = 1e5;
    std::vector<double> counts(64, 0.0);
    double total = 0.0;
    for (std::uint64_t s = 0; total < 1e5; ++s) {
        numerics::RngStream rng(5, s);
        const auto snap = generate_highway(cfg, rng);
        for (const auto& c : partition_clusters(snap.east, 25.0)) {
            counts[std::min<std::size_t>(c.size, 63)] += 1.0;
            total += 1.0;
        }
    }
    double tv = 0.0, tail = 1.0;
    for (int k = 1; k < 63; ++k) {
        const double p = analytics::cluster_size_pmf(0.05, 25.0, k);
        tv += std::abs(counts[k] / total - p);
        tail -= p;
    }
    tv += std::abs(counts[63] / total - tail);
    CHECK(0.5 * tv <= 0.01);
}

TEST_CASE("relay window matches a fine time-step search") {
    numerics::RngStream rng(6, 0);
    const double tau = 0.01;
    const double closing = 60.0;
    int hits = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const double ra = 30.0 + 40.0 * rng.uniform();
        const double rb = 30.0 + 40.0 * rng.uniform();
        const double h = 0.0;
        const double c = 40.0 + 120.0 * rng.uniform();
        std::vector<double> members;
        double x = 50.0 + 300.0 * rng.uniform();
        const int n = 1 + static_cast<int>(6 * rng.uniform());
        for (int i = 0; i < n; ++i) {
            members.push_back(x);
            x += std::min(ra, rb) * rng.uniform();
        }
        const WestCluster w{members.front(), members.back(), n};
        const double now = 2.0 * rng.uniform();
        const auto got = relay_window_start(w, h, c, ra, rb, closing, now);
        std::optional<double> brute;
        for (double t = now; t < 20.0; t += tau / 100) {
            bool a = false, b = false;
            for (double p : members) {
                a = a || std::abs(p - closing * t - h) <= ra;
                b = b || std::abs(p - closing * t - c) <= rb;
            }
            if (a && b) {
                brute = t;
                break;
            }
        }
        REQUIRE(got.has_value() == brute.has_value());
        if (got) {
            ++hits;
            CHECK(*brute >= *got - 1e-9);
            CHECK(*brute - *got <= tau);
        }
    }
    CHECK(hits > 50);
}

TEST_CASE("zero outage, fully connected: IPS is hop length over tau") {
    SimConfig cfg = hand_config(2000.0, 100.0);
    cfg.tau = 0.25;
    HighwaySnapshot snap;
    for (double x = 100.0; x <= 1900.0; x += 40.0) snap.east.push_back(x);
    snap.open_west = false;
    numerics::RngStream rng(1, 0);
    const auto tr = propagate(cfg, snap, rng);
    REQUIRE(!tr.censored);
    CHECK(tr.source_pos == 100.0);
    CHECK(tr.arrival_time == doctest::Approx(45 * 0.25).epsilon(1e-15));
    CHECK((tr.dest_pos - tr.source_pos) / tr.arrival_time == doctest::Approx(40.0 / 0.25).epsilon(1e-14));
    CHECK(std::count_if(tr.events.begin(), tr.events.end(),
                        [](const TraceEvent& e) { return e.kind == EventKind::hop; }) == 45);
    CHECK(tr.gaps.size() == 45);
}

TEST_CASE("hand-built layout with one gap bridged by a westbound pair") {
    SimConfig cfg = hand_config(160.0, 10.0);
    const auto& m = *cfg.model;
    const double r = m.r();
    HighwaySnapshot snap;
    snap.east = {10.0, 20.0, 30.0, 130.0, 140.0, 150.0};
    snap.west = {400.0, 410.0};
    snap.open_west = false;
    REQUIRE(100.0 > r * m.gain(3));
    numerics::RngStream rng(1, 0);
    const auto tr = propagate(cfg, snap, rng);
    REQUIRE(!tr.censored);

    // Transmit side: a member within r F(2) of x = 30; receive side: within
    // r F(3) of x = 130. Members drift west at 60 m/s.
    const double ra = r * m.gain(2);
    const double rb = r * m.gain(3);
    const double start = std::max((400.0 - 30.0 - ra) / 60.0, (400.0 - 130.0 - rb) / 60.0);
    REQUIRE(start <= std::min((410.0 - 30.0 + ra) / 60.0, (410.0 - 130.0 + rb) / 60.0));

    REQUIRE(tr.events.size() == 3);
    CHECK(tr.events[0].kind == EventKind::block_start);
    CHECK(tr.events[0].time == 0.0);
    CHECK(tr.events[0].frontier == 30.0);
    CHECK(tr.events[1].kind == EventKind::block_end);
    CHECK(tr.events[1].time == doctest::Approx(start).epsilon(1e-14));
    CHECK(tr.events[2].kind == EventKind::relay);
    CHECK(tr.events[2].time == doctest::Approx(start + 2 * cfg.tau).epsilon(1e-14));
    CHECK(tr.events[2].frontier == 150.0);
    CHECK(tr.arrival_time == tr.events[2].time);

    REQUIRE(tr.gaps.size() == 5);
    CHECK(tr.gaps[2].outcome == GapOutcome::blocked);
    CHECK(tr.gaps[2].length == 100.0);
    CHECK(tr.gaps[2].n_tx == 3);
    CHECK(tr.gaps[2].n_rx == 3);
    for (int i : {0, 1, 3, 4}) CHECK(tr.gaps[i].outcome == GapOutcome::intra);
    CHECK(tr.cluster_sizes == std::vector<int>{3, 3});
}

TEST_CASE("empty westbound lane and an unbridgeable gap: censored") {
    SimConfig cfg = hand_config(2000.0, 100.0);
    cfg.max_time = 100.0;
    HighwaySnapshot snap;
    snap.east = {100.0, 140.0, 400.0, 1950.0};
    snap.open_west = false;
    numerics::RngStream rng(1, 0);
    const auto tr = propagate(cfg, snap, rng);
    CHECK(tr.censored);
}

TEST_CASE("per-hop delay is tau / (1 - P_o)") {
    SimConfig cfg = hand_config(4e5, 100.0);
    cfg.zero_outage = false;
    cfg.max_time = 1e6;
    const double h = 50.0;  // just inside r F(1)
    HighwaySnapshot snap;
    for (double x = 100.0; x <= 4e5 - 100.0 + 1e-9; x += h) snap.east.push_back(x);
    snap.open_west = false;
    const double hops = static_cast<double>(snap.east.size() - 1);
    const double p = channel::analytic_outage(cfg.model->config(), 2, 1, h);
    REQUIRE(p > 0.002);

    numerics::RngStream rng(2, 0);
    HighwaySnapshot s1 = snap;
    const auto det = propagate(cfg, s1, rng);
    REQUIRE(!det.censored);
    const double se = cfg.tau * std::sqrt(p) / (1 - p) / std::sqrt(hops);
    CHECK(std::abs(det.arrival_time / hops - cfg.tau / (1 - p)) <= 5 * se);

    cfg.mode = Mode::channel_sampled;
    HighwaySnapshot s2 = snap;
    const auto sam = propagate(cfg, s2, rng);
    REQUIRE(!sam.censored);
    const double per_hop = sam.arrival_time / hops;
    MESSAGE("sampled per-hop " << per_hop / cfg.tau << " tau, analytic " << 1 / (1 - p));
    // Real fading at the edge of r F(1) misses about as often as the target.
    CHECK(per_hop >= cfg.tau);
    CHECK(per_hop <= cfg.tau / (1 - 0.02));
}

TEST_CASE("replicates are reproducible and traces well-formed") {
    SimConfig cfg = base();
    for (Mode mode : {Mode::deterministic, Mode::channel_sampled}) {
        cfg.mode = mode;
        for (std::uint64_t rep : {0u, 1u, 2u}) {
            const auto a = run_replicate(cfg, rep);
            const auto b = run_replicate(cfg, rep);
            REQUIRE(a.events.size() == b.events.size());
            for (std::size_t i = 0; i < a.events.size(); ++i) {
                CHECK(a.events[i].time == b.events[i].time);
                CHECK(a.events[i].frontier == b.events[i].frontier);
                CHECK(a.events[i].kind == b.events[i].kind);
            }
            CHECK(a.arrival_time == b.arrival_time);

            double t = 0.0, f = a.source_pos;
            bool in_block = false;
            for (const auto& e : a.events) {
                CHECK(e.time >= t);
                CHECK(e.frontier >= f);
                t = e.time;
                f = e.frontier;
                if (e.kind == EventKind::block_start) {
                    CHECK(!in_block);
                    in_block = true;
                }
                if (e.kind == EventKind::block_end) {
                    CHECK(in_block);
                    in_block = false;
                }
            }
            CHECK(!in_block);
        }
    }
}

TEST_CASE("measure_ips") {
    SimConfig cfg = base();
    const auto est = measure_ips(cfg, 10);
    CHECK(est.records.size() == 10);
    CHECK(est.used + static_cast<std::size_t>(est.censoring_rate * 10 + 0.5) == 10);
    CHECK(est.mean > 0.0);
    CHECK(est.mean_ground == doctest::Approx(est.mean + 30.0));

    SimConfig dead = hand_config(2000.0, 100.0);
    dead.lambda_w = 0.0;
    dead.lambda_e = 0.5;
    dead.max_time = 50.0;
    // Sparse eastbound with no westbound help: every run stalls.
    dead.model = std::make_shared<const RangeModel>(RangeModel::noncooperative(channel::ChannelConfig{}.with_range(1.0)));
    CHECK_THROWS_AS(measure_ips(dead, 3), EstimationError);
}

TEST_CASE("faster traffic speeds up propagation in sparse traffic") {
    SimConfig slow = base(0.025);
    SimConfig fast = slow;
    fast.v = 60.0;
    const auto a = measure_ips(slow, 200);
    const auto b = measure_ips(fast, 200);
    MESSAGE("v=30: " << a.mean << " (censored " << a.censoring_rate << "), v=60: " << b.mean
                     << " (censored " << b.censoring_rate << ")");
    CHECK(b.mean > a.mean);
}

TEST_CASE("harvested statistics") {
    SimConfig cfg = base();
    std::vector<PacketTrace> traces;
    measure_ips(cfg, 5, &traces);
    const auto s = harvest_statistics(traces);
    CHECK(s.gaps_total > 1000);
    CHECK(s.gaps_bridged + s.unbridged_gaps.size() == s.gaps_total);
    CHECK(s.blocking_durations.size() == s.unbridged_gaps.size());
    CHECK(s.bridged_fraction > 0.9);
    for (const auto& c : s.cycles) {
        CHECK(c.distance > 0.0);
        CHECK(c.wait > 0.0);
        CHECK(c.transmit > 0.0);
    }
    CHECK(harvest_statistics({}).gaps_total == 0);
}
