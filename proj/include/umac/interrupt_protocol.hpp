// Interrupt-phase protocol on a neighborhood graph: emergency nodes send a
// primary interrupt signal, one-hop detectors relay a secondary one, and
// everything that hears either keeps off the service channels for the rest
// of the window. Detection outcomes are link-level Bernoulli draws fed by
// the detector's analytic miss rates.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "umac/rng.hpp"
#include "umac/stats.hpp"

namespace umac::proto {

// Undirected neighborhood graph with a designated emergency subset. Node
// ids are 0..node_count-1; adjacency is kept symmetric by construction.
class NodeGraph {
  public:
    NodeGraph(int node_count, const std::vector<std::pair<int, int>>& edges,
              std::set<int> emergency);

    // Reads "nodes N" / "emergency I" / "edge U V" lines; blank lines and
    // '#' comments are skipped. Malformed input reports the line number.
    static NodeGraph parse(std::istream& in);
    static NodeGraph parse_text(const std::string& text);
    std::string serialize() const;

    // Center node 0 with four one-hop neighbors 1..4 and four two-hop nodes
    // 5..8, each bridging two adjacent one-hop nodes.
    static NodeGraph ring_demo();

    // Random geometric graph: node positions uniform on a width x height
    // box, adjacent iff within radius. The first n_emergency ids form the
    // emergency set.
    static NodeGraph disk(int node_count, double width, double height,
                          double radius, int n_emergency, Rng& rng);

    int node_count() const { return static_cast<int>(adjacency_.size()); }
    const std::set<int>& neighbors(int node) const;
    const std::set<int>& emergency_set() const { return emergency_; }

    // Nodes at hop distance exactly 1 (resp. 2) from the emergency set,
    // excluding the emergency nodes themselves.
    std::set<int> one_hop_set() const;
    std::set<int> two_hop_set() const;

  private:
    std::vector<std::set<int>> adjacency_;
    std::set<int> emergency_;
};

enum class NodeStatus { Emergency, SilencedByPis, SilencedBySis, Unaware };

const char* to_string(NodeStatus status);

struct ProtocolOutcome {
    std::vector<NodeStatus> statuses;
    std::set<int> silenced;     // non-emergency nodes off the service channels
    std::set<int> sis_senders;  // nodes that detected a primary signal
    std::set<int> false_alarmed;

    // Per-node signal exposure and detection counts. "Audible" counts the
    // signals a node's neighbors actually transmitted; "detected" counts
    // the Bernoulli successes among them.
    std::vector<int> pis_audible;
    std::vector<int> pis_detected;
    std::vector<int> sis_audible;
    std::vector<int> sis_detected;

    double interrupt_time = 0.5e-3;
    double access_time = 9.5e-3;
};

std::string outcome_csv(const ProtocolOutcome& outcome);

// One interrupt round. Every emergency node transmits the primary signal;
// each neighbor detects each audible primary independently with probability
// 1 - p_m_pis, and any non-emergency detector relays the secondary signal,
// detected per link with probability 1 - p_m_sis. Emergency nodes transmit
// in the access phase no matter what they themselves detect. A node hearing
// nothing at all is silenced spuriously with probability far (a detector
// false alarm; it relays nothing). The per-link uniforms are drawn in a
// fixed topology order, so runs from the same seed are coupled: with false
// alarms off, lowering either miss probability can only grow the silenced
// set.
ProtocolOutcome run_interrupt(const NodeGraph& graph, double p_m_pis,
                              double p_m_sis, double far, Rng& rng);

// Empirical per-class miss rates over repeated rounds (false alarms off).
// A class with no members reports rate 0 with the vacuous interval [0, 1].
struct CoverageReport {
    double one_hop_rate = 0.0;
    Interval one_hop_ci;
    double two_hop_rate = 0.0;
    Interval two_hop_ci;
    std::uint64_t one_hop_samples = 0;
    std::uint64_t two_hop_samples = 0;
};

CoverageReport coverage_failure_rate(const NodeGraph& graph, double p_m_pis,
                                     double p_m_sis, std::uint64_t trials,
                                     Rng& rng);

// Interrupt-signal airtime: n_points * q_points samples at sample_rate.
double pis_duration(int n_points, int q_points, double sample_rate);

struct BudgetReport {
    double t_interrupt = 0.0;
    double t_access = 0.0;
    double ttl = 0.0;
    double total = 0.0;
    double slack = 0.0;  // ttl - total; negative when over budget
    bool ok = false;
};

BudgetReport budget_check(double t_interrupt, double t_access, double ttl);

}  // namespace umac::proto
