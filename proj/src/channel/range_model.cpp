#include "vmimo/channel/range_model.hpp"

#include <algorithm>
#include <cmath>

#include "vmimo/errors.hpp"
#include "vmimo/numerics/special.hpp"

namespace vmimo::channel {

namespace {
// Guards the inverses against round-off when y was itself read off the table.
constexpr double kRelTol = 1e-12;
}  // namespace

RangeModel::RangeModel(const ChannelConfig& cfg, int cap) : RangeModel(cfg, cap, true) {}

RangeModel RangeModel::noncooperative(const ChannelConfig& cfg, int cap) {
    return RangeModel(cfg, cap, false);
}

RangeModel::RangeModel(const ChannelConfig& cfg, int cap, bool cooperative)
    : cfg_(cfg), cap_(cap), cooperative_(cooperative) {
    cfg_.validate();
    if (cap < 1) throw DomainError("gain cap must be >= 1");
    r_ = single_range(cfg_);
    table_.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    single_.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    if (!cooperative_) {
        std::fill(table_.begin() + 1, table_.end(), 1.0);
        std::fill(single_.begin() + 1, single_.end(), 1.0);
        return;
    }
    // F(n) = [2 c2(n)^3 / c1^3]^(1/delta), c(n) = sqrt(V) z(P_out^(1/n)) + M.
    const PatnaikParams p1 = single_link_params(cfg_);
    const PatnaikParams p2 = dual_link_params(cfg_);
    const double z0 = numerics::inverse_normal_cdf(cfg_.P_out_target);
    const double c1 = std::sqrt(p1.V) * z0 + p1.M;
    if (!(c1 > 0.0)) throw ModelDomainError("target outage unreachable under normal approximation");
    for (int n = 1; n <= cap; ++n) {
        const double z = numerics::inverse_normal_cdf(std::pow(cfg_.P_out_target, 1.0 / n));
        const double c2 = std::sqrt(p2.V) * z + p2.M;
        const double cs = std::sqrt(p1.V) * z + p1.M;
        if (!(c2 > 0.0) || !(cs > 0.0)) {
            throw ModelDomainError("target outage unreachable under normal approximation");
        }
        table_[n] = std::pow(2.0 * std::pow(c2 / c1, 3.0), 1.0 / cfg_.delta);
        single_[n] = std::pow(std::pow(cs / c1, 3.0), 1.0 / cfg_.delta);
    }
}

double RangeModel::gain(int n) const {
    if (n <= 0) return 0.0;
    return table_[static_cast<std::size_t>(std::min(n, cap_))];
}

double RangeModel::gain_single_tx(int n) const {
    if (n <= 0) return 0.0;
    return single_[static_cast<std::size_t>(std::min(n, cap_))];
}

GainInverse RangeModel::inv_gain_min(double y) const {
    const double target = y * (1.0 - kRelTol);
    if (target <= table_[1]) return {1, false};
    if (table_[cap_] < target) return {cap_, true};
    auto it = std::lower_bound(table_.begin() + 1, table_.end(), target);
    return {static_cast<int>(it - table_.begin()), false};
}

GainInverse RangeModel::inv_gain_max(double y) const {
    const double target = y * (1.0 - kRelTol);
    if (target <= table_[1]) return {0, false};
    if (table_[cap_] < target) return {cap_, true};
    // First index with F >= target, minus one.
    auto it = std::lower_bound(table_.begin() + 1, table_.end(), target);
    return {static_cast<int>(it - table_.begin()) - 1, false};
}

GainInverse RangeModel::min_bridge_cluster(int n_rx, double gap) const {
    if (!(gap >= 0.0)) throw DomainError("gap must be >= 0");
    const double direct = gain(n_rx);
    if (gap <= r_ * direct * (1.0 + kRelTol)) return {0, false};
    return inv_gain_min(gap / r_ - direct);
}

}  // namespace vmimo::channel
