#include "umac/coded_aloha.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace umac::coded {

DegreeDistribution::DegreeDistribution(std::vector<Term> weights)
    : weights_(std::move(weights)) {
    if (weights_.empty())
        throw std::invalid_argument("DegreeDistribution: no terms");
    std::sort(weights_.begin(), weights_.end(),
              [](const Term& a, const Term& b) { return a.degree < b.degree; });
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const auto& term = weights_[i];
        if (term.degree < 1)
            throw std::invalid_argument("DegreeDistribution: degree must be >= 1");
        if (i > 0 && term.degree == weights_[i - 1].degree)
            throw std::invalid_argument("DegreeDistribution: duplicate degree");
        if (term.probability < 0.0)
            throw std::invalid_argument("DegreeDistribution: negative probability");
        total += term.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("DegreeDistribution: probabilities must sum to 1");
}

DegreeDistribution DegreeDistribution::regular(int degree) {
    return DegreeDistribution({{degree, 1.0}});
}

DegreeDistribution DegreeDistribution::parse(std::istream& in) {
    std::vector<Term> terms;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        Term term;
        std::string trailing;
        if (!(fields >> term.degree >> term.probability) || (fields >> trailing))
            throw std::invalid_argument(
                "degree distribution line " + std::to_string(line_no) +
                ": expected \"degree probability\"");
        terms.push_back(term);
    }
    return DegreeDistribution(std::move(terms));
}

DegreeDistribution DegreeDistribution::parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

std::string DegreeDistribution::serialize() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& term : weights_)
        out << term.degree << " " << term.probability << "\n";
    return out.str();
}

double DegreeDistribution::mean_degree() const {
    double mean = 0.0;
    for (const auto& term : weights_) mean += term.degree * term.probability;
    return mean;
}

int sample_degree(const DegreeDistribution& dist, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (const auto& term : dist.weights()) {
        cum += term.probability;
        if (u < cum) return term.degree;
    }
    return dist.weights().back().degree;  // guards rounding at u ~ 1
}

SicResult sic_decode(const aloha::Timeline& timeline) {
    SicResult result;
    const auto& p = timeline.placements;
    if (p.empty()) return result;
    const double tp = timeline.packet_tp;

    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&p](std::size_t a, std::size_t b) { return p[a].start < p[b].start; });

    // A replica is clean when no live replica of another undecoded node
    // overlaps it. Each pass decodes the earliest clean replica's node and
    // rescans, since a removal can expose earlier replicas.
    auto decoded = [&result](int node) { return result.decoded.count(node) != 0; };
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto& self = p[order[i]];
            if (decoded(self.node)) continue;
            bool clean = true;
            for (std::size_t j = i; j-- > 0;) {
                const auto& other = p[order[j]];
                if (self.start - other.start >= tp) break;
                if (other.node != self.node && !decoded(other.node)) {
                    clean = false;
                    break;
                }
            }
            for (std::size_t j = i + 1; clean && j < order.size(); ++j) {
                const auto& other = p[order[j]];
                if (other.start - self.start >= tp) break;
                if (other.node != self.node && !decoded(other.node)) clean = false;
            }
            if (clean) {
                ++result.iterations;
                result.peeling_trace.push_back(
                    {result.iterations, self.node, self.start});
                result.decoded.insert(self.node);
                progress = true;
                break;
            }
        }
    }
    return result;
}

namespace {

// Same rejection rule as the fixed-degree sampler: redraw the node's whole
// replica set until pairwise disjoint, with a cap for hopeless packings.
void place_node(int node, int degree, double t, double tp, Rng& rng,
                std::vector<aloha::Placement>& out) {
    const double span = t - tp;
    std::vector<double> starts(static_cast<std::size_t>(degree));
    std::vector<double> sorted(starts.size());
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (auto& s : starts) s = rng.uniform(0.0, span);
        sorted = starts;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] - sorted[i - 1] < tp) {
                ok = false;
                break;
            }
        if (ok) {
            for (double s : starts) out.push_back({node, s});
            return;
        }
    }
    throw std::runtime_error("place_node: rejection cap hit; packing too tight");
}

}  // namespace

aloha::LossEstimate simulate_coded_rloss(int k, const DegreeDistribution& dist,
                                         double t, double tp,
                                         std::uint64_t trials, Rng& rng) {
    if (k < 1) throw std::invalid_argument("simulate_coded_rloss: k must be >= 1");
    if (!(t > 0.0) || !(tp > 0.0))
        throw std::invalid_argument("simulate_coded_rloss: t and tp must be positive");
    if (dist.max_degree() * tp > t)
        throw std::invalid_argument(
            "simulate_coded_rloss: max degree does not fit in the window");
    if (trials < 1)
        throw std::invalid_argument("simulate_coded_rloss: trials must be >= 1");

    std::uint64_t failures = 0;
    RunningStats per_trial;
    aloha::Timeline timeline;
    timeline.packet_tp = tp;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng sub = rng.derive(trial);
        timeline.placements.clear();
        for (int node = 0; node < k; ++node)
            place_node(node, sample_degree(dist, sub), t, tp, sub,
                       timeline.placements);
        const auto lost =
            static_cast<std::uint64_t>(k) - sic_decode(timeline).decoded.size();
        failures += lost;
        per_trial.add(static_cast<double>(lost) / k);
    }

    aloha::LossEstimate estimate;
    estimate.trials = trials * static_cast<std::uint64_t>(k);
    estimate.r_loss =
        static_cast<double>(failures) / static_cast<double>(estimate.trials);
    estimate.ci = loss_interval(estimate.r_loss,
                                static_cast<double>(estimate.trials), per_trial);
    return estimate;
}

SweepResult sweep_sustainable_k(const std::vector<DegreeDistribution>& dists,
                                const std::vector<int>& k_grid, double r_target,
                                double t, double tp, std::uint64_t trials,
                                Rng& rng) {
    SweepResult result;
    result.rows.reserve(dists.size() * k_grid.size());
    result.sustainable_k.assign(dists.size(), 0);
    for (std::size_t di = 0; di < dists.size(); ++di) {
        for (int k : k_grid) {
            Rng cell = rng.derive(result.rows.size());
            SweepRow row;
            row.dist_index = di;
            row.nodes_k = k;
            row.estimate = simulate_coded_rloss(k, dists[di], t, tp, trials, cell);
            if (row.estimate.r_loss <= r_target && k > result.sustainable_k[di])
                result.sustainable_k[di] = k;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

}  // namespace umac::coded
