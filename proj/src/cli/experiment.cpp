#include "vmimo/cli/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "vmimo/cli/config_file.hpp"
#include "vmimo/errors.hpp"

namespace vmimo::cli {

namespace {

using Json = nlohmann::ordered_json;

double to_real(const std::map<std::string, std::string>& m, const std::string& key) {
    const std::string& s = m.at(key);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(key + ": '" + s + "' is not a number");
    }
    return x;
}

long long to_int(const std::map<std::string, std::string>& m, const std::string& key) {
    const std::string& s = m.at(key);
    long long x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(key + ": '" + s + "' is not an integer");
    }
    return x;
}

bool to_bool(const std::map<std::string, std::string>& m, const std::string& key) {
    const std::string& s = m.at(key);
    return s == "true" || s == "1" || s == "yes";
}

std::vector<double> to_list(const std::map<std::string, std::string>& m, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(m.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw ConfigError(key + ": '" + item + "' is not a number");
        }
        out.push_back(x);
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    auto res = std::to_chars(buf, buf + 16, h, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json breakdown_json(const analytics::IpsBreakdown& b) {
    return Json{{"e_d", num(b.e_d)},         {"e_tw", num(b.e_tw)},
                {"e_tt", num(b.e_tt)},       {"p_b", num(b.p_b)},
                {"e_ge", num(b.e_ge)},       {"v_p", num(b.v_p)},
                {"v_p_ground", num(b.v_p_ground)}, {"mean_outage", num(b.mean_outage)},
                {"regime", std::string(analytics::regime_name(b.regime))},
                {"cap_degraded", b.cap_degraded}};
}

Json estimate_json(const sim::IpsEstimate& e) {
    return Json{{"mean", num(e.mean)},
                {"mean_ground", num(e.mean_ground)},
                {"std_error", num(e.std_error)},
                {"censoring_rate", num(e.censoring_rate)},
                {"used", e.used}};
}

// Runs task(i) for i in [0, n) on `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& task) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) task(i);
    };
    if (jobs <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct SweepPoint {
    double range = 0.0;
    double lambda = 0.0;
    double v = 0.0;
    analytics::IpsBreakdown coop;
    analytics::IpsBreakdown noncoop;
    sim::IpsEstimate sim_coop;
    sim::IpsEstimate sim_noncoop;
    bool has_sim_coop = false;
    bool has_sim_noncoop = false;
    std::string error;
};

sim::IpsEstimate simulate(const ExperimentConfig& cfg, std::shared_ptr<const channel::RangeModel> model,
                          double lambda, double v, const analytics::IpsBreakdown& analytic) {
    sim::SimConfig sc;
    sc.road_length = cfg.road_length;
    sc.lambda_e = lambda;
    sc.lambda_w = lambda;
    sc.v = v;
    sc.tau = cfg.protocol.tau;
    sc.mode = cfg.mode;
    sc.seed = cfg.seed;
    sc.margin = cfg.margin;
    sc.zero_outage = cfg.zero_outage;
    sc.singleton_tx_law = cfg.singleton_tx_law;
    sc.max_time = cfg.max_time;
    sc.analytic_vp = analytic.regime == analytics::Regime::normal ? analytic.v_p : 0.0;
    sc.model = std::move(model);
    return sim::measure_ips(sc, cfg.replicates);
}

void run_sweep_point(const ExperimentConfig& cfg, SweepPoint& p) {
    const channel::ChannelConfig ch = cfg.channel.with_range(p.range);
    auto coop = std::make_shared<const channel::RangeModel>(ch, cfg.gain_cap);
    auto nonc = std::make_shared<const channel::RangeModel>(
        channel::RangeModel::noncooperative(ch, cfg.gain_cap));
    const analytics::TrafficConfig tr{p.lambda, p.v};
    p.coop = analytics::analytic_ips(*coop, tr, cfg.protocol);
    p.noncoop = analytics::analytic_ips(*nonc, tr, cfg.protocol);
    try {
        p.sim_coop = simulate(cfg, coop, p.lambda, p.v, p.coop);
        p.has_sim_coop = true;
    } catch (const EstimationError& e) {
        p.error = e.what();
    }
    try {
        p.sim_noncoop = simulate(cfg, nonc, p.lambda, p.v, p.noncoop);
        p.has_sim_noncoop = true;
    } catch (const EstimationError& e) {
        if (p.error.empty()) p.error = e.what();
    }
}

double safe_ratio(double a, double b) {
    return b > 0.0 ? a / b : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::gain_curve: return "gain-curve";
        case Scenario::density_sweep: return "density-sweep";
        case Scenario::speed_sweep: return "speed-sweep";
        case Scenario::gain_ratio: return "gain-ratio";
        case Scenario::channel_mc: return "channel-mc";
        case Scenario::single_point: return "single-point";
    }
    return "unknown";
}

ExperimentConfig build_experiment(const std::map<std::string, std::string>& resolved) {
    ExperimentConfig cfg;
    cfg.resolved = resolved;
    const std::string sc = resolved.at("experiment.scenario");
    bool found = false;
    for (Scenario s : {Scenario::gain_curve, Scenario::density_sweep, Scenario::speed_sweep,
                       Scenario::gain_ratio, Scenario::channel_mc, Scenario::single_point}) {
        if (scenario_name(s) == sc) {
            cfg.scenario = s;
            found = true;
        }
    }
    if (!found) throw ConfigError("experiment.scenario: unknown scenario '" + sc + "'");

    cfg.channel.K = to_real(resolved, "channel.K");
    cfg.channel.delta = to_real(resolved, "channel.delta");
    cfg.channel.P_t = to_real(resolved, "channel.P_t");
    cfg.channel.P_min = to_real(resolved, "channel.P_min");
    cfg.channel.P_out_target = to_real(resolved, "channel.P_out");
    cfg.channel.N0 = to_real(resolved, "channel.N0");
    cfg.gain_cap = static_cast<int>(to_int(resolved, "channel.gain_cap"));
    cfg.ranges = to_list(resolved, "channel.range");
    cfg.lambdas = to_list(resolved, "traffic.lambda");
    cfg.speeds = to_list(resolved, "traffic.v");
    cfg.protocol.tau = to_real(resolved, "protocol.tau");
    cfg.road_length = to_real(resolved, "sim.road_length");
    cfg.margin = to_real(resolved, "sim.margin");
    cfg.mode = resolved.at("sim.mode") == "channel-sampled" ? sim::Mode::channel_sampled
                                                            : sim::Mode::deterministic;
    cfg.replicates = static_cast<std::size_t>(to_int(resolved, "sim.replicates"));
    cfg.zero_outage = to_bool(resolved, "sim.zero_outage");
    cfg.singleton_tx_law = to_bool(resolved, "sim.singleton_tx_law");
    cfg.max_time = to_real(resolved, "sim.max_time");
    cfg.seed = static_cast<std::uint64_t>(to_int(resolved, "experiment.seed"));
    cfg.output_dir = resolved.at("experiment.output");
    cfg.jobs = static_cast<unsigned>(to_int(resolved, "experiment.jobs"));
    cfg.gain_n_max = static_cast<int>(to_int(resolved, "gain.n_max"));
    cfg.mc_samples = static_cast<std::size_t>(to_int(resolved, "gain.mc_samples"));
    try {
        cfg.channel.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.output_dir);
    const std::string name = scenario_name(cfg.scenario);
    const std::string rendered = render_config(cfg.resolved);
    const std::uint64_t config_hash = fnv1a(rendered);

    RunResult result;
    result.csv_path = (fs::path(cfg.output_dir) / (name + ".csv")).string();
    result.summary_path = (fs::path(cfg.output_dir) / "summary.json").string();
    result.config_path = (fs::path(cfg.output_dir) / "resolved_config.txt").string();
    {
        std::ofstream out(result.config_path, std::ios::binary);
        out << rendered;
    }

    auto row_hash = [&](const std::string& key) { return hex64(fnv1a(rendered + "|" + key)); };
    std::ostringstream csv;
    Json points = Json::array();
    const auto& F = format_number;

    if (cfg.scenario == Scenario::gain_curve) {
        const channel::ChannelConfig ch = cfg.channel.with_range(cfg.ranges.front());
        const channel::RangeModel model(ch, std::max(cfg.gain_cap, cfg.gain_n_max));
        const int n = cfg.gain_n_max;
        std::vector<channel::OutageEstimate> mc(static_cast<std::size_t>(n) + 1);
        std::vector<int> probes;
        for (int k = 1; k <= n; k *= 2) probes.push_back(k);
        parallel_for(probes.size(), cfg.jobs, [&](std::size_t i) {
            numerics::RngStream rng(cfg.seed, i);
            const int k = probes[i];
            mc[k] = channel::mc_outage(ch, 2, k, model.mimo_range(k), rng, cfg.mc_samples);
        });
        csv << "n_receivers,gain,gain_single_tx,mimo_range,mc_outage_at_R,mc_std_error,config_hash\n";
        for (int k = 1; k <= n; ++k) {
            const bool probed = (k & (k - 1)) == 0;
            csv << k << ',' << F(model.gain(k)) << ',' << F(model.gain_single_tx(k)) << ','
                << F(model.mimo_range(k)) << ',' << (probed ? F(mc[k].p) : "") << ','
                << (probed ? F(mc[k].std_error) : "") << ','
                << row_hash("n=" + std::to_string(k)) << '\n';
            Json pj{{"n_receivers", k}, {"gain", num(model.gain(k))}};
            if (probed) pj["mc_outage_at_R"] = num(mc[k].p);
            points.push_back(pj);
        }
    } else if (cfg.scenario == Scenario::channel_mc) {
        const channel::ChannelConfig ch = cfg.channel.with_range(cfg.ranges.front());
        const channel::RangeModel model(ch, cfg.gain_cap);
        struct Probe {
            int n_tx;
            int n_rx;
            double distance;
            channel::OutageEstimate est;
        };
        std::vector<Probe> probes{{1, 1, model.r(), {}}};
        for (int k : {1, 2, 4, 8, 16, 32}) probes.push_back({2, k, model.mimo_range(k), {}});
        parallel_for(probes.size(), cfg.jobs, [&](std::size_t i) {
            numerics::RngStream rng(cfg.seed, i);
            auto& p = probes[i];
            p.est = channel::mc_outage(ch, p.n_tx, p.n_rx, p.distance, rng, cfg.mc_samples);
        });
        csv << "n_tx,n_receivers,distance,target,analytic_outage,mc_outage,mc_std_error,config_hash\n";
        for (const auto& p : probes) {
            const double a = channel::analytic_outage(ch, p.n_tx, p.n_rx, p.distance);
            csv << p.n_tx << ',' << p.n_rx << ',' << F(p.distance) << ',' << F(ch.P_out_target)
                << ',' << F(a) << ',' << F(p.est.p) << ',' << F(p.est.std_error) << ','
                << row_hash("tx=" + std::to_string(p.n_tx) + ",rx=" + std::to_string(p.n_rx))
                << '\n';
            points.push_back(Json{{"n_tx", p.n_tx},
                                  {"n_receivers", p.n_rx},
                                  {"distance", num(p.distance)},
                                  {"analytic_outage", num(a)},
                                  {"mc_outage", num(p.est.p)},
                                  {"mc_std_error", num(p.est.std_error)}});
        }
    } else {
        std::vector<SweepPoint> grid;
        for (double r : cfg.ranges) {
            for (double lam : cfg.lambdas) {
                for (double v : cfg.speeds) {
                    SweepPoint p;
                    p.range = r;
                    p.lambda = lam;
                    p.v = v;
                    grid.push_back(p);
                }
            }
        }
        parallel_for(grid.size(), cfg.jobs, [&](std::size_t i) {
            try {
                run_sweep_point(cfg, grid[i]);
            } catch (const std::exception& e) {
                grid[i].error = e.what();
            }
        });
        csv << "index,range,lambda,v,tau,regime,e_d,e_tw,e_tt,p_b,e_ge,mean_outage,"
               "vp_analytic,vp_analytic_ground,regime_noncoop,vp_analytic_noncoop,"
               "vp_sim,vp_sim_se,vp_sim_ground,censor_rate,vp_sim_noncoop,vp_sim_noncoop_se,"
               "censor_rate_noncoop,ratio_analytic,ratio_sim,status,config_hash\n";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& p = grid[i];
            const double vs = p.has_sim_coop ? p.sim_coop.mean : nan;
            const double vsn = p.has_sim_noncoop ? p.sim_noncoop.mean : nan;
            const std::string status = p.error.empty() ? "ok" : "partial";
            if (!p.error.empty() && !result.partial) {
                result.partial = true;
                result.first_error = p.error;
            }
            csv << i << ',' << F(p.range) << ',' << F(p.lambda) << ',' << F(p.v) << ','
                << F(cfg.protocol.tau) << ',' << analytics::regime_name(p.coop.regime) << ','
                << F(p.coop.e_d) << ',' << F(p.coop.e_tw) << ',' << F(p.coop.e_tt) << ','
                << F(p.coop.p_b) << ',' << F(p.coop.e_ge) << ',' << F(p.coop.mean_outage) << ','
                << F(p.coop.v_p) << ',' << F(p.coop.v_p_ground) << ','
                << analytics::regime_name(p.noncoop.regime) << ',' << F(p.noncoop.v_p) << ','
                << F(vs) << ',' << F(p.has_sim_coop ? p.sim_coop.std_error : nan) << ','
                << F(p.has_sim_coop ? p.sim_coop.mean_ground : nan) << ','
                << F(p.has_sim_coop ? p.sim_coop.censoring_rate : nan) << ',' << F(vsn) << ','
                << F(p.has_sim_noncoop ? p.sim_noncoop.std_error : nan) << ','
                << F(p.has_sim_noncoop ? p.sim_noncoop.censoring_rate : nan) << ','
                << F(safe_ratio(p.coop.v_p, p.noncoop.v_p)) << ',' << F(safe_ratio(vs, vsn))
                << ',' << status << ','
                << row_hash("r=" + F(p.range) + ",lambda=" + F(p.lambda) + ",v=" + F(p.v))
                << '\n';
            Json pj{{"index", i},
                    {"range", p.range},
                    {"lambda", p.lambda},
                    {"v", p.v},
                    {"analytic", breakdown_json(p.coop)},
                    {"analytic_noncooperative", breakdown_json(p.noncoop)}};
            if (p.has_sim_coop) pj["simulated"] = estimate_json(p.sim_coop);
            if (p.has_sim_noncoop) pj["simulated_noncooperative"] = estimate_json(p.sim_noncoop);
            if (!p.error.empty()) pj["error"] = p.error;
            points.push_back(pj);
        }
    }

    {
        std::ofstream out(result.csv_path, std::ios::binary);
        out << csv.str();
    }
    Json resolved = Json::object();
    for (const auto& [k, v] : cfg.resolved) resolved[k] = v;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json summary{{"scenario", name},
                 {"config_hash", hex64(config_hash)},
                 {"seed", cfg.seed},
                 {"partial", result.partial},
                 {"resolved_config", resolved},
                 {"artifacts",
                  {{"csv", result.csv_path},
                   {"summary", result.summary_path},
                   {"config", result.config_path}}},
                 {"wall_clock_seconds", wall},
                 {"points", points}};
    if (result.partial) summary["first_error"] = result.first_error;
    std::ofstream out(result.summary_path, std::ios::binary);
    out << summary.dump(2) << '\n';
    return result;
}

}  // namespace vmimo::cli
