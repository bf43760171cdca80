// Command-line front end: `vmimo run <config>` and `vmimo validate <config>`.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vmimo/cli/config_file.hpp"
#include "vmimo/cli/experiment.hpp"
#include "vmimo/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual-MIMO vehicular information propagation: analysis and simulation"};
    app.require_subcommand(1);

    std::string config_path;
    long long seed = -1;
    long long replicates = -1;
    long long jobs = -1;
    std::string output;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file (key = value)")->required();
    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", config_path, "Config file (key = value)")->required();
    for (auto* sub : {run, validate}) {
        sub->add_option("--seed", seed, "Override experiment.seed");
        sub->add_option("--replicates", replicates, "Override sim.replicates");
        sub->add_option("--jobs", jobs, "Override experiment.jobs (0 = one per CPU)");
        sub->add_option("--output", output, "Override experiment.output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        vmimo::cli::RawConfig raw = vmimo::cli::read_config_file(config_path);
        if (seed >= 0) raw.values["experiment.seed"] = std::to_string(seed);
        if (replicates >= 0) raw.values["sim.replicates"] = std::to_string(replicates);
        if (jobs >= 0) raw.values["experiment.jobs"] = std::to_string(jobs);
        if (!output.empty()) raw.values["experiment.output"] = output;

        const auto report = vmimo::cli::validate_config(raw);
        if (validate->parsed()) {
            std::cout << report.to_string();
            return report.ok() ? kExitOk : kExitConfig;
        }
        if (!report.ok()) {
            std::cerr << report.to_string();
            return kExitConfig;
        }
        const auto cfg = vmimo::cli::build_experiment(vmimo::cli::resolve_config(raw));
        const auto result = vmimo::cli::run_experiment(cfg);
        std::cout << "wrote " << result.csv_path << "\n"
                  << "wrote " << result.summary_path << "\n"
                  << "wrote " << result.config_path << "\n";
        if (result.partial) {
            std::cerr << "partial results: " << result.first_error << "\n";
            return kExitNumeric;
        }
        return kExitOk;
    } catch (const vmimo::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const vmimo::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
