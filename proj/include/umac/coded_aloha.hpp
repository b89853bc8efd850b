// Coded unslotted random access: nodes draw their replica count from a
// degree distribution and the receiver peels collisions by successive
// interference cancellation over the recorded window.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "umac/multireplica_aloha.hpp"
#include "umac/rng.hpp"

namespace umac::coded {

// Probability mass over replica degrees, Lambda(x) = sum_d lambda_d x^d.
// Weights are kept sorted by degree; the constructor enforces distinct
// degrees >= 1, nonnegative mass, and unit total within 1e-12.
class DegreeDistribution {
  public:
    struct Term {
        int degree = 0;
        double probability = 0.0;
    };

    explicit DegreeDistribution(std::vector<Term> weights);

    // Single-degree shorthand, Lambda(x) = x^d.
    static DegreeDistribution regular(int degree);

    // Reads "degree probability" lines; blank lines and '#' comments are
    // skipped. Malformed input reports the offending line number.
    static DegreeDistribution parse(std::istream& in);
    static DegreeDistribution parse_text(const std::string& text);

    std::string serialize() const;

    const std::vector<Term>& weights() const { return weights_; }
    int max_degree() const { return weights_.back().degree; }
    double mean_degree() const;

  private:
    std::vector<Term> weights_;
};

int sample_degree(const DegreeDistribution& dist, Rng& rng);

struct PeelStep {
    int iteration = 0;      // 1-based decode step
    int node = 0;           // node removed at this step
    double replica_start = 0.0;  // the clean replica that exposed it
};

struct SicResult {
    std::set<int> decoded;
    int iterations = 0;  // decode steps taken; equals decoded.size()
    std::vector<PeelStep> peeling_trace;
};

// Fixpoint peeling with perfect cancellation: while some replica of an
// undecoded node overlaps nothing from other undecoded nodes, decode the
// node owning the earliest such replica and drop all its replicas. The
// decoded set does not depend on that order; the trace does.
SicResult sic_decode(const aloha::Timeline& timeline);

// Draws each node's degree from dist, places that many replicas under the
// same non-overlap rejection rule as the fixed-degree sampler, and pools
// per-node failures of sic_decode across trials.
aloha::LossEstimate simulate_coded_rloss(int k, const DegreeDistribution& dist,
                                         double t, double tp,
                                         std::uint64_t trials, Rng& rng);

struct SweepRow {
    std::size_t dist_index = 0;
    int nodes_k = 0;
    aloha::LossEstimate estimate;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // Largest grid K per distribution whose estimate meets the target, or 0
    // when none does.
    std::vector<int> sustainable_k;
};

SweepResult sweep_sustainable_k(const std::vector<DegreeDistribution>& dists,
                                const std::vector<int>& k_grid, double r_target,
                                double t, double tp, std::uint64_t trials,
                                Rng& rng);

}  // namespace umac::coded
