#include "umac/multireplica_aloha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace umac::aloha {

void AccessParams::validate() const {
    if (!(horizon_t > 0.0))
        throw std::invalid_argument("AccessParams: horizon_t must be positive");
    if (!(packet_tp > 0.0))
        throw std::invalid_argument("AccessParams: packet_tp must be positive");
    if (nodes_k < 1) throw std::invalid_argument("AccessParams: nodes_k must be >= 1");
    if (degree_d < 1) throw std::invalid_argument("AccessParams: degree_d must be >= 1");
    if (degree_d * packet_tp > horizon_t)
        throw std::invalid_argument("AccessParams: d replicas do not fit in the window");
}

double rho(const AccessParams& params) {
    params.validate();
    return 2.0 * (params.nodes_k - 1) * params.packet_tp / params.horizon_t;
}

double mu(const AccessParams& params) {
    params.validate();
    if (params.nodes_k == 1) return std::numeric_limits<double>::infinity();
    return params.horizon_t / ((params.nodes_k - 1) * static_cast<double>(params.degree_d));
}

double effective_g(const AccessParams& params) {
    params.validate();
    return params.nodes_k * static_cast<double>(params.degree_d) * params.packet_tp /
           params.horizon_t;
}

double p0(const AccessParams& params, bool* degenerate) {
    params.validate();
    const double t = params.horizon_t;
    const double tp = params.packet_tp;
    const int d = params.degree_d;
    if (degenerate) *degenerate = false;
    if ((d + 1) * tp > t) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return std::pow(t - (d + 1) * tp, d + 1) /
           (std::pow(t - d * tp, d) * (t - tp));
}

double analytic_rloss(const AccessParams& params) {
    params.validate();
    if (params.nodes_k == 1) return 0.0;
    const double clear = std::pow(p0(params), params.nodes_k - 1);
    return std::pow(1.0 - clear, params.degree_d);
}

double poisson_rloss(const AccessParams& params) {
    params.validate();
    if (params.nodes_k == 1) return 0.0;
    const double load = rho(params) * params.degree_d;
    return std::pow(1.0 - std::exp(-load), params.degree_d);
}

double optimal_degree(int k, double t, double tp) {
    if (k < 1 || !(t > 0.0) || !(tp > 0.0) || tp > t)
        throw std::invalid_argument("optimal_degree: bad parameters");
    if (k == 1) return std::numeric_limits<double>::infinity();
    return std::log(2.0) / (2.0 * (k - 1)) * t / tp;
}

int optimal_degree_int(int k, double t, double tp) {
    if (k == 1) {
        if (!(t > 0.0) || !(tp > 0.0) || tp > t)
            throw std::invalid_argument("optimal_degree: bad parameters");
        return 1;
    }
    const double star = optimal_degree(k, t, tp);
    const int lo = std::max(1, static_cast<int>(std::floor(star)));
    const int hi = lo + 1;
    AccessParams params;
    params.horizon_t = t;
    params.packet_tp = tp;
    params.nodes_k = k;
    params.degree_d = lo;
    const double at_lo = analytic_rloss(params);
    if (hi * tp > t) return lo;
    params.degree_d = hi;
    return analytic_rloss(params) < at_lo ? hi : lo;
}

double max_sustainable_nodes(double r_target, double t, double tp) {
    if (!(r_target > 0.0) || r_target > 1.0 || !(t > 0.0) || !(tp > 0.0) || tp > t)
        throw std::invalid_argument("max_sustainable_nodes: bad parameters");
    if (r_target == 1.0) return std::numeric_limits<double>::infinity();
    const double ln2 = std::log(2.0);
    return -(t / tp) * ln2 * ln2 / (2.0 * std::log(r_target)) + 1.0;
}

int max_sustainable_nodes_int(double r_target, double t, double tp) {
    if (!(r_target > 0.0) || r_target >= 1.0)
        throw std::invalid_argument("max_sustainable_nodes: target must be in (0, 1)");
    AccessParams params;
    params.horizon_t = t;
    params.packet_tp = tp;
    int best = 0;
    for (int k = 1; k <= 1000000; ++k) {
        params.nodes_k = k;
        params.degree_d = optimal_degree_int(k, t, tp);
        if (analytic_rloss(params) <= r_target)
            best = k;
        else
            break;
    }
    return best;
}

Timeline generate_timeline(const AccessParams& params, Rng& rng) {
    params.validate();
    const double span = params.horizon_t - params.packet_tp;
    const int d = params.degree_d;

    Timeline timeline;
    timeline.packet_tp = params.packet_tp;
    timeline.placements.reserve(static_cast<std::size_t>(params.nodes_k) * d);

    std::vector<double> starts(static_cast<std::size_t>(d));
    std::vector<double> sorted(static_cast<std::size_t>(d));
    for (int node = 0; node < params.nodes_k; ++node) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            for (auto& s : starts) s = rng.uniform(0.0, span);
            sorted = starts;
            std::sort(sorted.begin(), sorted.end());
            bool ok = true;
            for (std::size_t i = 1; i < sorted.size(); ++i)
                if (sorted[i] - sorted[i - 1] < params.packet_tp) {
                    ok = false;
                    break;
                }
            if (ok) {
                for (double s : starts) timeline.placements.push_back({node, s});
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::runtime_error(
                "generate_timeline: rejection cap hit; packing too tight");
    }
    return timeline;
}

std::set<int> decode_no_sic(const Timeline& timeline) {
    const auto& p = timeline.placements;
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&p](std::size_t a, std::size_t b) { return p[a].start < p[b].start; });

    std::vector<char> hit(p.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& a = p[order[i]];
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto& b = p[order[j]];
            if (b.start >= a.start + timeline.packet_tp) break;
            if (a.node != b.node) {
                hit[order[i]] = 1;
                hit[order[j]] = 1;
            }
        }
    }

    std::set<int> clean;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!hit[i]) clean.insert(p[i].node);
    return clean;
}

LossEstimate simulate_rloss(const AccessParams& params, std::uint64_t trials, Rng& rng) {
    params.validate();
    if (trials < 1) throw std::invalid_argument("simulate_rloss: trials must be >= 1");

    const double k = params.nodes_k;
    std::uint64_t failures = 0;
    RunningStats per_trial;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng sub = rng.derive(t);
        const auto timeline = generate_timeline(params, sub);
        const auto winners = decode_no_sic(timeline);
        const auto lost = static_cast<std::uint64_t>(params.nodes_k) - winners.size();
        failures += lost;
        per_trial.add(static_cast<double>(lost) / k);
    }

    LossEstimate estimate;
    estimate.trials = trials * static_cast<std::uint64_t>(params.nodes_k);
    estimate.r_loss =
        static_cast<double>(failures) / static_cast<double>(estimate.trials);
    estimate.ci = loss_interval(estimate.r_loss,
                                static_cast<double>(estimate.trials), per_trial);
    return estimate;
}

}  // namespace umac::aloha
