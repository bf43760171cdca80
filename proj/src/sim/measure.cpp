#include <cmath>

#include "vmimo/errors.hpp"
#include "vmimo/sim/sim.hpp"

namespace vmimo::sim {

IpsEstimate measure_ips(const SimConfig& cfg, std::size_t replicates,
                        std::vector<PacketTrace>* keep_traces) {
    cfg.validate();
    if (replicates < 1) throw DomainError("measure_ips: need at least one replicate");
    IpsEstimate est;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t censored = 0;
    for (std::size_t i = 0; i < replicates; ++i) {
        PacketTrace tr = run_replicate(cfg, i);
        ReplicateRecord rec;
        rec.replicate = i;
        rec.censored = tr.censored || !(tr.arrival_time > 0.0);
        rec.arrival_time = tr.arrival_time;
        if (rec.censored) {
            ++censored;
        } else {
            rec.ips = (tr.dest_pos - tr.source_pos) / tr.arrival_time;
            sum += rec.ips;
            sum_sq += rec.ips * rec.ips;
        }
        est.records.push_back(rec);
        if (keep_traces) keep_traces->push_back(std::move(tr));
    }
    est.used = replicates - censored;
    est.censoring_rate = static_cast<double>(censored) / static_cast<double>(replicates);
    if (est.used == 0) throw EstimationError("measure_ips: every replicate hit the time cap");
    const double n = static_cast<double>(est.used);
    est.mean = sum / n;
    est.mean_ground = est.mean + cfg.v;
    if (est.used > 1) {
        const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

}  // namespace vmimo::sim
