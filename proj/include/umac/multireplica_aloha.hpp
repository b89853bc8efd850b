// Unslotted multi-replica random access: geometric collision analysis on a
// finite window, the Poisson approximation and its optima, and Monte Carlo
// loss estimation.
#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "umac/rng.hpp"
#include "umac/stats.hpp"

namespace umac::aloha {

struct AccessParams {
    double horizon_t = 9.5e-3;  // access window T
    double packet_tp = 24e-6;   // replica duration Tp
    int nodes_k = 1;            // contending nodes K
    int degree_d = 1;           // replicas per node d

    void validate() const;  // T, Tp > 0; K, d >= 1; d replicas must fit in T
};

struct Placement {
    int node = 0;
    double start = 0.0;
};

struct Timeline {
    std::vector<Placement> placements;
    double packet_tp = 0.0;
};

// Pooled per-node loss estimate; trials counts (trial, node) pairs. The
// interval deflates the effective sample size from the trial-level spread,
// since node failures within one trial are dependent.
struct LossEstimate {
    double r_loss = 0.0;
    Interval ci;
    std::uint64_t trials = 0;
};

// Offered-load accessors: rho = 2 (K-1) Tp / T is the collision exposure of
// one replica, mu = T / ((K-1) d) the mean spacing between a node's
// competitors (infinite when K = 1), and G = K d Tp / T the effective load.
double rho(const AccessParams& params);
double mu(const AccessParams& params);
double effective_g(const AccessParams& params);

// Probability that one replica of a node lands clear of all d replicas of
// one other node, [T-(d+1)Tp]^(d+1) / ((T-dTp)^d (T-Tp)). When d+1 packets
// cannot fit in T the constraint region has zero volume; the value is 0 and
// *degenerate (if given) is set.
double p0(const AccessParams& params, bool* degenerate = nullptr);

// Per-node loss rate (1 - P0^(K-1))^d: every replica must be hit by at
// least one of the K-1 competitors.
double analytic_rloss(const AccessParams& params);

// Poisson-process approximation (1 - e^(-rho d))^d of the same quantity.
double poisson_rloss(const AccessParams& params);

// Continuous loss-minimizing degree ln2/(2(K-1)) * T/Tp. A single node has
// no contention, so the optimum diverges: returns +infinity for k = 1. The
// integer companion compares analytic_rloss at the two neighboring degrees
// (and returns 1 for k = 1).
double optimal_degree(int k, double t, double tp);
int optimal_degree_int(int k, double t, double tp);

// Largest sustainable population -(T/Tp) ln^2(2) / (2 ln r_target) + 1 at
// the optimal degree; +infinity for r_target = 1. The integer companion
// scans K upward at the best integer degree and needs r_target in (0, 1).
double max_sustainable_nodes(double r_target, double t, double tp);
int max_sustainable_nodes_int(double r_target, double t, double tp);

// Draws each node's d replica starts uniformly on [0, T-Tp] conditioned on
// pairwise non-overlap within the node, by redrawing the whole set until it
// is admissible (capped; the cap only binds for near-full packings).
Timeline generate_timeline(const AccessParams& params, Rng& rng);

// Nodes with at least one replica that overlaps no other node's replica.
// Intervals are half-open [s, s+Tp), so an exact touch is not a collision.
std::set<int> decode_no_sic(const Timeline& timeline);

// Monte Carlo per-node loss over independently drawn timelines, pooled
// across nodes, with a deterministic sub-seed per trial.
LossEstimate simulate_rloss(const AccessParams& params, std::uint64_t trials, Rng& rng);

}  // namespace umac::aloha
