#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vmimo/analytics/analytics.hpp"
#include "vmimo/channel/channel.hpp"
#include "vmimo/sim/sim.hpp"

namespace vmimo::cli {

enum class Scenario { gain_curve, density_sweep, speed_sweep, gain_ratio, channel_mc, single_point };

struct ExperimentConfig {
    Scenario scenario = Scenario::single_point;
    channel::ChannelConfig channel;
    int gain_cap = channel::kDefaultGainCap;
    std::vector<double> ranges{25.0};
    std::vector<double> lambdas{0.05};
    std::vector<double> speeds{30.0};
    analytics::ProtocolConfig protocol;
    double road_length = 50'000.0;
    double margin = 1000.0;
    sim::Mode mode = sim::Mode::deterministic;
    bool zero_outage = false;
    bool singleton_tx_law = false;
    double max_time = 0.0;
    std::size_t replicates = 200;
    std::uint64_t seed = 1;
    std::string output_dir = "results";
    unsigned jobs = 0;  // 0: one per CPU
    int gain_n_max = 1024;
    std::size_t mc_samples = 100'000;
    std::map<std::string, std::string> resolved;  // for self-describing output
};

std::string scenario_name(Scenario s);

/// Builds a typed config from resolved key/value pairs. Throws ConfigError.
ExperimentConfig build_experiment(const std::map<std::string, std::string>& resolved);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Shortest round-trip decimal form, locale independent; "nan"/"inf" kept.
std::string format_number(double x);

struct RunResult {
    std::string csv_path;
    std::string summary_path;
    std::string config_path;
    bool partial = false;
    std::string first_error;
};

/// Runs the scenario and writes `<scenario>.csv`, `summary.json` and
/// `resolved_config.txt` into cfg.output_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace vmimo::cli
