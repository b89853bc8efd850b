#include "umac/interrupt_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace umac::proto {

NodeGraph::NodeGraph(int node_count, const std::vector<std::pair<int, int>>& edges,
                     std::set<int> emergency)
    : adjacency_(node_count > 0 ? static_cast<std::size_t>(node_count) : 0),
      emergency_(std::move(emergency)) {
    if (node_count < 1)
        throw std::invalid_argument("NodeGraph: node_count must be >= 1");
    auto in_range = [node_count](int v) { return v >= 0 && v < node_count; };
    for (const auto& [u, v] : edges) {
        if (!in_range(u) || !in_range(v))
            throw std::invalid_argument("NodeGraph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("NodeGraph: self-loop");
        adjacency_[static_cast<std::size_t>(u)].insert(v);
        adjacency_[static_cast<std::size_t>(v)].insert(u);
    }
    for (int e : emergency_)
        if (!in_range(e))
            throw std::invalid_argument("NodeGraph: emergency node out of range");
}

NodeGraph NodeGraph::parse(std::istream& in) {
    int node_count = -1;
    std::vector<std::pair<int, int>> edges;
    std::set<int> emergency;
    std::string line;
    int line_no = 0;
    auto fail = [&line_no](const std::string& what) {
        throw std::invalid_argument("graph line " + std::to_string(line_no) +
                                    ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string keyword, trailing;
        fields >> keyword;
        if (keyword == "nodes") {
            if (node_count >= 0) fail("duplicate nodes line");
            if (!(fields >> node_count) || node_count < 1)
                fail("expected \"nodes N\" with N >= 1");
        } else if (keyword == "emergency") {
            int id = -1;
            if (!(fields >> id)) fail("expected \"emergency ID\"");
            if (node_count < 0) fail("emergency before nodes line");
            if (id < 0 || id >= node_count) fail("emergency node out of range");
            emergency.insert(id);
        } else if (keyword == "edge") {
            int u = -1, v = -1;
            if (!(fields >> u >> v)) fail("expected \"edge U V\"");
            if (node_count < 0) fail("edge before nodes line");
            if (u < 0 || u >= node_count || v < 0 || v >= node_count)
                fail("edge endpoint out of range");
            if (u == v) fail("self-loop");
            edges.emplace_back(u, v);
        } else {
            fail("unknown keyword \"" + keyword + "\"");
        }
        if (fields >> trailing) fail("trailing input \"" + trailing + "\"");
    }
    if (node_count < 0)
        throw std::invalid_argument("graph: missing nodes line");
    return NodeGraph(node_count, edges, std::move(emergency));
}

NodeGraph NodeGraph::parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

std::string NodeGraph::serialize() const {
    std::ostringstream out;
    out << "nodes " << node_count() << "\n";
    for (int e : emergency_) out << "emergency " << e << "\n";
    for (int u = 0; u < node_count(); ++u)
        for (int v : adjacency_[static_cast<std::size_t>(u)])
            if (u < v) out << "edge " << u << " " << v << "\n";
    return out.str();
}

NodeGraph NodeGraph::ring_demo() {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= 4; ++i) edges.emplace_back(0, i);
    for (int i = 0; i < 4; ++i) {
        edges.emplace_back(5 + i, 1 + i);
        edges.emplace_back(5 + i, 1 + (i + 1) % 4);
    }
    return NodeGraph(9, edges, {0});
}

NodeGraph NodeGraph::disk(int node_count, double width, double height,
                          double radius, int n_emergency, Rng& rng) {
    if (node_count < 1)
        throw std::invalid_argument("NodeGraph::disk: node_count must be >= 1");
    if (n_emergency < 0 || n_emergency > node_count)
        throw std::invalid_argument("NodeGraph::disk: bad emergency count");
    if (!(width > 0.0) || !(height > 0.0) || !(radius > 0.0))
        throw std::invalid_argument("NodeGraph::disk: dimensions must be positive");
    std::vector<double> x(static_cast<std::size_t>(node_count));
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(0.0, width);
        y[i] = rng.uniform(0.0, height);
    }
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < node_count; ++u)
        for (int v = u + 1; v < node_count; ++v)
            if (std::hypot(x[static_cast<std::size_t>(u)] - x[static_cast<std::size_t>(v)],
                           y[static_cast<std::size_t>(u)] - y[static_cast<std::size_t>(v)]) <=
                radius)
                edges.emplace_back(u, v);
    std::set<int> emergency;
    for (int e = 0; e < n_emergency; ++e) emergency.insert(e);
    return NodeGraph(node_count, edges, std::move(emergency));
}

const std::set<int>& NodeGraph::neighbors(int node) const {
    if (node < 0 || node >= node_count())
        throw std::invalid_argument("NodeGraph: node out of range");
    return adjacency_[static_cast<std::size_t>(node)];
}

namespace {

// Hop distances from the emergency set, capped at 3 (anything further plays
// no role in the protocol).
std::vector<int> hop_distance(const NodeGraph& graph) {
    std::vector<int> dist(static_cast<std::size_t>(graph.node_count()), 3);
    std::queue<int> frontier;
    for (int e : graph.emergency_set()) {
        dist[static_cast<std::size_t>(e)] = 0;
        frontier.push(e);
    }
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        if (dist[static_cast<std::size_t>(u)] >= 2) continue;
        for (int v : graph.neighbors(u))
            if (dist[static_cast<std::size_t>(v)] > dist[static_cast<std::size_t>(u)] + 1) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                frontier.push(v);
            }
    }
    return dist;
}

}  // namespace

std::set<int> NodeGraph::one_hop_set() const {
    const auto dist = hop_distance(*this);
    std::set<int> out;
    for (int v = 0; v < node_count(); ++v)
        if (dist[static_cast<std::size_t>(v)] == 1) out.insert(v);
    return out;
}

std::set<int> NodeGraph::two_hop_set() const {
    const auto dist = hop_distance(*this);
    std::set<int> out;
    for (int v = 0; v < node_count(); ++v)
        if (dist[static_cast<std::size_t>(v)] == 2) out.insert(v);
    return out;
}

const char* to_string(NodeStatus status) {
    switch (status) {
        case NodeStatus::Emergency: return "EMERGENCY";
        case NodeStatus::SilencedByPis: return "SILENCED_BY_PIS";
        case NodeStatus::SilencedBySis: return "SILENCED_BY_SIS";
        case NodeStatus::Unaware: return "UNAWARE";
    }
    return "UNAWARE";
}

std::string outcome_csv(const ProtocolOutcome& outcome) {
    auto count_at = [](const std::vector<int>& counts, std::size_t i) {
        return i < counts.size() ? counts[i] : 0;
    };
    std::ostringstream out;
    out << "node,status,pis_heard,sis_heard\n";
    for (std::size_t v = 0; v < outcome.statuses.size(); ++v)
        out << v << "," << to_string(outcome.statuses[v]) << ","
            << count_at(outcome.pis_detected, v) << ","
            << count_at(outcome.sis_detected, v) << "\n";
    return out.str();
}

ProtocolOutcome run_interrupt(const NodeGraph& graph, double p_m_pis,
                              double p_m_sis, double far, Rng& rng) {
    for (double p : {p_m_pis, p_m_sis, far})
        if (!(p >= 0.0) || p > 1.0)
            throw std::invalid_argument("run_interrupt: probabilities must be in [0, 1]");

    const int n = graph.node_count();
    ProtocolOutcome outcome;
    outcome.statuses.assign(static_cast<std::size_t>(n), NodeStatus::Unaware);
    outcome.pis_audible.assign(static_cast<std::size_t>(n), 0);
    outcome.pis_detected.assign(static_cast<std::size_t>(n), 0);
    outcome.sis_audible.assign(static_cast<std::size_t>(n), 0);
    outcome.sis_detected.assign(static_cast<std::size_t>(n), 0);
    const auto& emergency = graph.emergency_set();

    // Per-link uniforms are consumed in a fixed topology order, never
    // conditionally on earlier outcomes, so the same seed couples runs
    // across different probability settings (common random numbers).
    for (int v = 0; v < n; ++v)
        for (int e : graph.neighbors(v))
            if (emergency.count(e)) {
                ++outcome.pis_audible[static_cast<std::size_t>(v)];
                if (rng.uniform01() >= p_m_pis)
                    ++outcome.pis_detected[static_cast<std::size_t>(v)];
            }

    for (int v = 0; v < n; ++v)
        if (!emergency.count(v) && outcome.pis_detected[static_cast<std::size_t>(v)] > 0)
            outcome.sis_senders.insert(v);

    for (int v = 0; v < n; ++v)
        for (int s : graph.neighbors(v)) {
            const double u = rng.uniform01();
            if (!outcome.sis_senders.count(s)) continue;
            ++outcome.sis_audible[static_cast<std::size_t>(v)];
            if (u >= p_m_sis) ++outcome.sis_detected[static_cast<std::size_t>(v)];
        }

    for (int v = 0; v < n; ++v) {
        const auto idx = static_cast<std::size_t>(v);
        const double u = rng.uniform01();
        if (emergency.count(v)) {
            outcome.statuses[idx] = NodeStatus::Emergency;
            continue;
        }
        if (outcome.pis_detected[idx] > 0) {
            outcome.statuses[idx] = NodeStatus::SilencedByPis;
        } else if (outcome.sis_detected[idx] > 0) {
            outcome.statuses[idx] = NodeStatus::SilencedBySis;
        } else if (outcome.pis_audible[idx] == 0 && outcome.sis_audible[idx] == 0 &&
                   u < far) {
            outcome.statuses[idx] = NodeStatus::SilencedByPis;
            outcome.false_alarmed.insert(v);
        }
        if (outcome.statuses[idx] != NodeStatus::Unaware) outcome.silenced.insert(v);
    }
    return outcome;
}

CoverageReport coverage_failure_rate(const NodeGraph& graph, double p_m_pis,
                                     double p_m_sis, std::uint64_t trials,
                                     Rng& rng) {
    if (trials < 1)
        throw std::invalid_argument("coverage_failure_rate: trials must be >= 1");
    const auto one_hop = graph.one_hop_set();
    const auto two_hop = graph.two_hop_set();

    std::uint64_t one_missed = 0;
    std::uint64_t two_missed = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng sub = rng.derive(t);
        const auto outcome = run_interrupt(graph, p_m_pis, p_m_sis, 0.0, sub);
        for (int v : one_hop)
            if (!outcome.silenced.count(v)) ++one_missed;
        for (int v : two_hop)
            if (!outcome.silenced.count(v)) ++two_missed;
    }

    CoverageReport report;
    report.one_hop_samples = trials * one_hop.size();
    report.two_hop_samples = trials * two_hop.size();
    if (report.one_hop_samples > 0) {
        report.one_hop_rate = static_cast<double>(one_missed) /
                              static_cast<double>(report.one_hop_samples);
        report.one_hop_ci = wilson_interval(static_cast<double>(one_missed),
                                            static_cast<double>(report.one_hop_samples));
    } else {
        report.one_hop_ci = {0.0, 1.0};
    }
    if (report.two_hop_samples > 0) {
        report.two_hop_rate = static_cast<double>(two_missed) /
                              static_cast<double>(report.two_hop_samples);
        report.two_hop_ci = wilson_interval(static_cast<double>(two_missed),
                                            static_cast<double>(report.two_hop_samples));
    } else {
        report.two_hop_ci = {0.0, 1.0};
    }
    return report;
}

double pis_duration(int n_points, int q_points, double sample_rate) {
    if (n_points < 1 || q_points < 1 || !(sample_rate > 0.0))
        throw std::invalid_argument("pis_duration: bad arguments");
    return static_cast<double>(n_points) * q_points / sample_rate;
}

BudgetReport budget_check(double t_interrupt, double t_access, double ttl) {
    if (!(t_interrupt >= 0.0) || !(t_access >= 0.0) || !(ttl > 0.0))
        throw std::invalid_argument("budget_check: times must be nonnegative, ttl positive");
    BudgetReport report;
    report.t_interrupt = t_interrupt;
    report.t_access = t_access;
    report.ttl = ttl;
    report.total = t_interrupt + t_access;
    report.slack = ttl - report.total;
    report.ok = report.total <= ttl + 1e-15;
    return report;
}

}  // namespace umac::proto
