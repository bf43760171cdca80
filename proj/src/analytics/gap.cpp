#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "series_detail.hpp"
#include "vmimo/errors.hpp"
#include "vmimo/numerics/quadrature.hpp"

namespace vmimo::analytics {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Law of the unbridged gap. With thresholds t_j = r F(j) increasing in j,
//   P(G_e > x) = e^{-lambda x} sum_{t_j <= x} P_N(j) e^{lambda t_j} + P(N > J(x)),
// where J(x) counts the thresholds at or below x. Sizes beyond the cap share
// t_cap, so once x >= t_cap every size is active.
class GapLaw {
public:
    GapLaw(const RangeModel& model, double lambda)
        : lambda_(lambda), cap_(model.cap()), thresholds_(model.cap()), log_a_(model.cap() + 1) {
        const double r = model.r();
        log_q_ = detail::log_link_prob(lambda, r);
        log_a_[0] = kNegInf;
        for (int j = 1; j <= cap_; ++j) {
            thresholds_[j - 1] = r * model.gain(j);
            const double log_w = -lambda * r + (j - 1) * log_q_ + lambda * thresholds_[j - 1];
            log_a_[j] = log_add(log_a_[j - 1], log_w);
        }
        // Every size above the cap behaves like the cap: mass q^cap.
        log_a_all_ = log_add(log_a_[cap_], cap_ * log_q_ + lambda * thresholds_[cap_ - 1]);
    }

    int active(double x) const {
        return static_cast<int>(std::upper_bound(thresholds_.begin(), thresholds_.end(), x) -
                                thresholds_.begin());
    }

    double log_weight(int j) const { return j >= cap_ ? log_a_all_ : log_a_[j]; }

    double survival(double x) const {
        if (x < 0.0) return 1.0;
        const int j = active(x);
        const double head = std::exp(log_weight(j) - lambda_ * x);
        return j >= cap_ ? head : head + std::exp(j * log_q_);
    }

    double pdf(double x) const {
        if (x < 0.0) return 0.0;
        const int j = active(x);
        if (j == 0) return 0.0;
        return lambda_ * std::exp(log_weight(j) - lambda_ * x);
    }

    /// log P(a < G_e <= b), b may be +inf.
    double log_mass(double a, double b) const {
        if (!(b > a)) return kNegInf;
        const int ja = active(a);
        const int jb = std::isinf(b) ? cap_ : active(b);
        if (ja == jb && ja > 0) {
            if (std::isinf(b)) return log_weight(ja) - lambda_ * a;
            return log_weight(ja) - lambda_ * a + std::log(-std::expm1(-lambda_ * (b - a)));
        }
        const double m = survival(a) - (std::isinf(b) ? 0.0 : survival(b));
        return m > 0.0 ? std::log(m) : kNegInf;
    }

private:
    double lambda_;
    int cap_;
    double log_q_ = 0.0;
    std::vector<double> thresholds_;
    std::vector<double> log_a_;
    double log_a_all_ = 0.0;
};

}  // namespace

double unbridged_gap_pdf(const RangeModel& model, const TrafficConfig& traffic, double x) {
    traffic.validate();
    return GapLaw(model, traffic.lambda).pdf(x);
}

double unbridged_gap_cdf(const RangeModel& model, const TrafficConfig& traffic, double x) {
    traffic.validate();
    return 1.0 - GapLaw(model, traffic.lambda).survival(x);
}

double expected_unbridged_gap_closed(const RangeModel& model, const TrafficConfig& traffic) {
    traffic.validate();
    const double lambda = traffic.lambda;
    const double r = model.r();
    const double log_q = detail::log_link_prob(lambda, r);
    double sum = 0.0;
    for (int k = 1; k <= model.cap(); ++k) {
        const double pn = std::exp(-lambda * r + (k - 1) * log_q);
        sum += pn * (r * model.gain(k) + 1.0 / lambda);
    }
    sum += std::exp(model.cap() * log_q) * (r * model.gain(model.cap()) + 1.0 / lambda);
    return sum;
}

double expected_unbridged_gap(const RangeModel& model, const TrafficConfig& traffic) {
    traffic.validate();
    const double lambda = traffic.lambda;
    const double r = model.r();
    const double log_q = detail::log_link_prob(lambda, r);

    numerics::Quadrature quad;
    quad.decay_rate = lambda;
    quad.absolute_tolerance = 0.0;
    // term(k) = q^{k-1} int_{rF(k)}^inf x lambda e^{-lambda x} dx / e^{-lambda r (F(k) - 1)}
    std::vector<double> memo(static_cast<std::size_t>(model.cap()) + 1, -1.0);
    auto term = [&](std::int64_t k) {
        const int kk = static_cast<int>(std::min<std::int64_t>(k, model.cap()));
        if (memo[kk] < 0.0) {
            const double a = r * model.gain(kk);
            memo[kk] = numerics::integrate(
                [lambda](double x) { return x * lambda * std::exp(-lambda * x); }, a,
                numerics::kInfinity, quad);
        }
        // From the cap up, all sizes share one term with mass P(N >= cap).
        if (k > model.cap()) return 0.0;
        const double shift = k == model.cap() ? lambda * r : 0.0;
        return std::exp((k - 1) * log_q + lambda * r * (model.gain(kk) - 1.0) + shift) *
               memo[kk];
    };
    const double g_max = r * model.gain_upper_bound() + 1.0 / lambda;
    const auto s = numerics::truncate_geometric_series(
        term,
        [&](std::int64_t k) {
            return k >= model.cap() ? 0.0 : std::exp(k * log_q) * g_max;
        },
        numerics::kDefaultSeriesEps * 1e-3);

    const double closed = expected_unbridged_gap_closed(model, traffic);
    if (std::abs(s.sum - closed) > 1e-9 * closed) {
        throw NumericError("expected_unbridged_gap: quadrature and closed form disagree", s.sum);
    }
    return s.sum;
}

BlockingIntegral blocking_integral_closed(const RangeModel& model, const TrafficConfig& traffic,
                                          double upper) {
    traffic.validate();
    const double lambda = traffic.lambda;
    const double r = model.r();
    const int cap = model.cap();
    const double log_q = detail::log_link_prob(lambda, r);
    const GapLaw law(model, lambda);

    // log(q^-n - 1)
    auto log_excess = [&](int n) {
        const double a = -n * log_q;
        return a + std::log(-std::expm1(-a));
    };

    // For receiving size k, G(k, x) = n on (r(F(k)+F(n-1)), r(F(k)+F(n))],
    // and sticks at the cap beyond r(F(k)+F(cap)).
    auto inner = [&](int k, double& log_cap_part) {
        double acc = kNegInf;
        const double fk = model.gain(k);
        for (int n = 1; n <= cap; ++n) {
            const double a = r * (fk + model.gain(n - 1));
            if (a >= upper) break;
            const double b = std::min(r * (fk + model.gain(n)), upper);
            const double lm = law.log_mass(a, b);
            if (lm != kNegInf) acc = log_add(acc, log_excess(n) + lm);
        }
        log_cap_part = kNegInf;
        const double a = r * (fk + model.gain(cap));
        if (a < upper) {
            const double lm = law.log_mass(a, upper);
            if (lm != kNegInf) log_cap_part = log_excess(cap) + lm;
            acc = log_add(acc, log_cap_part);
        }
        return acc;
    };

    BlockingIntegral out;
    out.log_value = kNegInf;
    out.log_cap_share = kNegInf;
    const double log_lambda = std::log(lambda);
    double last_inner = kNegInf;
    double last_cap = kNegInf;
    int k = 1;
    for (; k <= cap; ++k) {
        double cap_part = kNegInf;
        last_inner = inner(k, cap_part);
        last_cap = cap_part;
        const double log_w = -lambda * r + (k - 1) * log_q - log_lambda;
        out.log_value = log_add(out.log_value, log_w + last_inner);
        out.log_cap_share = log_add(out.log_cap_share, log_w + cap_part);
        // inner(k) is non-increasing in k, so the rest is at most q^k inner(k).
        const double log_rest = k * log_q - log_lambda + last_inner;
        if (last_inner == kNegInf || log_rest < out.log_value + std::log(1e-13)) return out;
    }
    // Sizes above the cap all behave like the cap; their mass is q^cap.
    out.log_value = log_add(out.log_value, cap * log_q - log_lambda + last_inner);
    out.log_cap_share = log_add(out.log_cap_share, cap * log_q - log_lambda + last_cap);
    return out;
}

double blocking_integral_quadrature(const RangeModel& model, const TrafficConfig& traffic,
                                    double upper) {
    traffic.validate();
    const double r = model.r();
    const GapLaw law(model, traffic.lambda);
    std::vector<double> cuts{0.0, upper};
    for (int k = 1; k <= model.cap() && r * model.gain(k) < upper; ++k) {
        cuts.push_back(r * model.gain(k));
        for (int n = 1; n <= model.cap(); ++n) {
            const double x = r * (model.gain(k) + model.gain(n));
            if (x >= upper) break;
            cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // E(B) is constant between cuts (up to the inverses' 1e-12 slack), so
    // take it at each midpoint and integrate only the density.
    numerics::Quadrature quad;
    quad.relative_tolerance = 1e-12;
    quad.absolute_tolerance = 1e-13;  // slivers between nearby cuts hit roundoff
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double eb = expected_bridge_distance(model, traffic, 0.5 * (cuts[i] + cuts[i + 1]));
        if (eb == 0.0) continue;
        total += eb * numerics::integrate([&](double x) { return law.pdf(x); }, cuts[i],
                                          cuts[i + 1], quad);
    }
    return total;
}

BlockingTime expected_blocking_time_detail(const RangeModel& model, const TrafficConfig& traffic) {
    traffic.validate();
    BlockingTime out;
    const BlockingIntegral bi = blocking_integral_closed(model, traffic, numerics::kInfinity);
    out.log_capped_integral = bi.log_value;
    // With F growing like log n, q^-n outruns the polynomial decay of the gap
    // tail, so the uncapped integral has no finite value. Flag whenever the
    // clamped-at-cap region carries a visible share of the result.
    out.cap_degraded = bi.log_cap_share > bi.log_value + std::log(1e-10);
    out.divergent = bi.log_cap_share > bi.log_value + std::log(1e-6);
    out.integral = std::exp(bi.log_value);
    const double e_ge = expected_unbridged_gap_closed(model, traffic);
    out.value = (e_ge + 1.0 / traffic.lambda + out.integral) / (2.0 * traffic.v);
    return out;
}

double expected_blocking_time(const RangeModel& model, const TrafficConfig& traffic) {
    return expected_blocking_time_detail(model, traffic).value;
}

}  // namespace vmimo::analytics
