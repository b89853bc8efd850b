// Small statistics helpers shared by the Monte Carlo modules.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace umac {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const { return 0.5 * (hi - lo); }
};

// Wilson score interval for a binomial proportion. n may be fractional: the
// pooled loss-rate estimators pass an effective sample size derived from
// trial-level variance (see loss_interval below).
inline Interval wilson_interval(double successes, double n, double z = 1.959963984540054) {
    if (n <= 0.0) return {0.0, 1.0};
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - spread), std::min(1.0, center + spread)};
}

// Welford running mean/variance.
class RunningStats {
  public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const {  // sample variance
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    void merge(const RunningStats& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) { *this = other; return; }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * nb / (na + nb);
        m2_ += other.m2_ + delta * delta * na * nb / (na + nb);
        n_ += other.n_;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// 95% interval for a pooled per-node failure rate. Node outcomes within one
// trial are dependent (they share a timeline), so the usual binomial n would
// overstate the information. The trial-level mean variance gives an honest
// effective sample size, which then feeds the Wilson formula; with
// independent events it reduces to the plain pooled Wilson interval.
inline Interval loss_interval(double pooled_rate, double pooled_n,
                              const RunningStats& per_trial_means) {
    double n_eff = pooled_n;
    if (per_trial_means.count() > 1 && per_trial_means.variance() > 0.0 &&
        pooled_rate > 0.0 && pooled_rate < 1.0) {
        const double var_of_mean =
            per_trial_means.variance() / static_cast<double>(per_trial_means.count());
        if (var_of_mean > 0.0)
            n_eff = std::min(pooled_n, pooled_rate * (1.0 - pooled_rate) / var_of_mean);
    }
    return wilson_interval(pooled_rate * n_eff, n_eff);
}

}  // namespace umac
