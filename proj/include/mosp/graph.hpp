#pragma once

#include "cost_vector.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mosp {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Index of a directed use of an undirected edge: 2*edge for u->v,
/// 2*edge+1 for v->u.
using ArcId = std::size_t;

template <std::size_t J>
struct BasicEdge {
    NodeId u = 0;
    NodeId v = 0;
    BasicCostVector<J> cost{};

    NodeId other(NodeId from) const noexcept { return from == u ? v : u; }

    friend bool operator==(const BasicEdge&, const BasicEdge&) = default;
};

struct Incidence {
    EdgeId edge;
    NodeId neighbor;
};

/// Undirected multi-attribute graph. Immutable after construction.
///
/// Each edge is stored once; both endpoints list it in their incidence
/// range, sorted by edge id. Self-loops are rejected, parallel edges are
/// allowed. Connectivity is not enforced here (see is_connected()).
template <std::size_t J>
class BasicGraph {
public:
    using Edge = BasicEdge<J>;
    using Cost = BasicCostVector<J>;

    BasicGraph() = default;

    BasicGraph(std::size_t node_count, std::vector<Edge> edges)
        : node_count_(node_count), edges_(std::move(edges)) {
        if (node_count_ == 0) throw std::invalid_argument("graph must have at least one node");
        if (node_count_ > std::numeric_limits<NodeId>::max())
            throw std::invalid_argument("node count exceeds NodeId range");
        if (edges_.size() > std::numeric_limits<EdgeId>::max())
            throw std::invalid_argument("edge count exceeds EdgeId range");
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const Edge& edge = edges_[e];
            if (edge.u >= node_count_ || edge.v >= node_count_)
                throw std::invalid_argument("edge " + std::to_string(e) + " references a missing node");
            if (edge.u == edge.v)
                throw std::invalid_argument("edge " + std::to_string(e) + " is a self-loop");
            if (!edge.cost.is_valid())
                throw std::invalid_argument("edge " + std::to_string(e) +
                                            " has a negative or non-finite cost");
        }
        build_incidence();
    }

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t arc_count() const noexcept { return 2 * edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const {
        if (e >= edges_.size()) throw std::out_of_range("edge id " + std::to_string(e) + " not in graph");
        return edges_[e];
    }

    std::span<const Incidence> incident(NodeId node) const noexcept {
        return std::span<const Incidence>(incidence_).subspan(offsets_[node],
                                                             offsets_[node + 1] - offsets_[node]);
    }

    std::size_t degree(NodeId node) const noexcept { return offsets_[node + 1] - offsets_[node]; }

    double average_degree() const noexcept {
        return 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(node_count_);
    }

    /// Arc for leaving `from` along `e`; throws if `e` is not incident to `from`.
    ArcId arc(NodeId from, EdgeId e) const {
        const Edge& edge = this->edge(e);
        if (edge.u == from) return 2 * static_cast<ArcId>(e);
        if (edge.v == from) return 2 * static_cast<ArcId>(e) + 1;
        throw std::invalid_argument("edge " + std::to_string(e) + " is not incident to node " +
                                    std::to_string(from));
    }

    bool is_connected() const {
        std::vector<char> seen(node_count_, 0);
        std::vector<NodeId> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const NodeId n = stack.back();
            stack.pop_back();
            for (const Incidence& inc : incident(n)) {
                if (!seen[inc.neighbor]) {
                    seen[inc.neighbor] = 1;
                    ++reached;
                    stack.push_back(inc.neighbor);
                }
            }
        }
        return reached == node_count_;
    }

    /// Same structure with new per-edge costs (indexed by edge id).
    BasicGraph with_costs(std::span<const Cost> costs) const {
        if (costs.size() != edges_.size()) throw std::invalid_argument("cost count does not match edge count");
        std::vector<Edge> edges = edges_;
        for (std::size_t e = 0; e < edges.size(); ++e) edges[e].cost = costs[e];
        return BasicGraph(node_count_, std::move(edges));
    }

    friend bool operator==(const BasicGraph& a, const BasicGraph& b) {
        return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
    }

private:
    void build_incidence() {
        offsets_.assign(node_count_ + 1, 0);
        for (const Edge& e : edges_) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        for (std::size_t n = 0; n < node_count_; ++n) offsets_[n + 1] += offsets_[n];
        incidence_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        // Edge ids are visited in increasing order, so every range ends up sorted.
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const Edge& edge = edges_[e];
            incidence_[fill[edge.u]++] = {static_cast<EdgeId>(e), edge.v};
            incidence_[fill[edge.v]++] = {static_cast<EdgeId>(e), edge.u};
        }
    }

    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Incidence> incidence_;
};

using Edge = BasicEdge<kDefaultAttributes>;
using Graph = BasicGraph<kDefaultAttributes>;

// ---------------------------------------------------------------------------
// Topologies

/// Requested size of a generated network plus the seed that fixes its shape.
struct TopologySpec {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::string name;
    std::uint64_t seed = 0;

    static constexpr std::size_t max_simple_edges(std::size_t nodes) noexcept {
        return nodes * (nodes - (nodes > 0 ? 1 : 0)) / 2;
    }

    /// Throws std::invalid_argument when no connected simple graph has
    /// this many nodes and edges.
    void validate() const {
        if (nodes == 0) throw std::invalid_argument("topology " + label() + ": node count must be positive");
        if (edges + 1 < nodes)
            throw std::invalid_argument("topology " + label() + ": " + std::to_string(edges) +
                                        " edges cannot connect " + std::to_string(nodes) + " nodes");
        if (edges > max_simple_edges(nodes))
            throw std::invalid_argument("topology " + label() + ": " + std::to_string(edges) +
                                        " edges exceed the simple-graph maximum of " +
                                        std::to_string(max_simple_edges(nodes)));
    }

    std::string label() const {
        return name.empty() ? std::to_string(nodes) + "N" + std::to_string(edges) + "E" : name;
    }

    /// Accepts "25N50E"-style tags, "MCC" (30 nodes, 35 edges), or "V,E".
    static TopologySpec parse(std::string_view text, std::uint64_t seed = 0) {
        auto to_size = [&](std::string_view digits) {
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                               [](char c) { return c >= '0' && c <= '9'; }))
                throw std::invalid_argument("bad topology '" + std::string(text) + "'");
            return static_cast<std::size_t>(std::stoull(std::string(digits)));
        };
        TopologySpec spec;
        spec.seed = seed;
        if (text == "MCC" || text == "mcc") {
            spec.nodes = 30;
            spec.edges = 35;
            spec.name = "30N35E";
        } else if (auto comma = text.find(','); comma != std::string_view::npos) {
            spec.nodes = to_size(text.substr(0, comma));
            spec.edges = to_size(text.substr(comma + 1));
            spec.name = spec.label();
        } else {
            const auto n = text.find('N');
            if (n == std::string_view::npos || text.size() < n + 3 || text.back() != 'E')
                throw std::invalid_argument("bad topology '" + std::string(text) +
                                            "' (expected e.g. 25N50E or 25,50)");
            spec.nodes = to_size(text.substr(0, n));
            spec.edges = to_size(text.substr(n + 1, text.size() - n - 2));
            spec.name = std::string(text);
        }
        spec.validate();
        return spec;
    }
};

namespace detail {

/// Decodes a Prüfer sequence into the edges of a labelled tree.
inline std::vector<std::pair<NodeId, NodeId>> prufer_decode(std::span<const NodeId> code,
                                                            std::size_t nodes) {
    std::vector<std::size_t> degree(nodes, 1);
    for (NodeId n : code) ++degree[n];
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> leaves;
    for (NodeId n = 0; n < nodes; ++n)
        if (degree[n] == 1) leaves.push(n);

    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(nodes - 1);
    for (NodeId n : code) {
        const NodeId leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(std::min(leaf, n), std::max(leaf, n));
        if (--degree[n] == 1) leaves.push(n);
    }
    const NodeId a = leaves.top();
    leaves.pop();
    const NodeId b = leaves.top();
    edges.emplace_back(std::min(a, b), std::max(a, b));
    return edges;
}

}  // namespace detail

/// Connected simple graph with exactly spec.nodes nodes and spec.edges
/// edges, all costs zero.
///
/// A uniformly random labelled spanning tree (random Prüfer sequence) is
/// extended with distinct non-tree edges drawn uniformly from the remaining
/// node pairs. The edge list is shuffled so edge ids carry no structure.
/// Fully determined by spec.seed.
template <std::size_t J = kDefaultAttributes>
BasicGraph<J> generate_topology(const TopologySpec& spec) {
    spec.validate();
    const std::size_t n = spec.nodes;
    Rng rng(spec.seed);

    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(spec.edges);
    if (n == 2) {
        pairs.emplace_back(0, 1);
    } else if (n > 2) {
        std::vector<NodeId> code(n - 2);
        for (auto& c : code) c = static_cast<NodeId>(rng.below(n));
        pairs = detail::prufer_decode(code, n);
    }

    std::unordered_set<std::uint64_t> used;
    auto key = [n](NodeId a, NodeId b) { return static_cast<std::uint64_t>(a) * n + b; };
    for (auto [a, b] : pairs) used.insert(key(a, b));

    const std::size_t extra = spec.edges - pairs.size();
    const std::size_t all_pairs = TopologySpec::max_simple_edges(n);
    if (extra > 0 && all_pairs <= (std::size_t{1} << 22)) {
        std::vector<std::pair<NodeId, NodeId>> pool;
        pool.reserve(all_pairs - pairs.size());
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b)
                if (!used.contains(key(a, b))) pool.emplace_back(a, b);
        // Partial Fisher-Yates: the first `extra` slots are a uniform sample.
        for (std::size_t i = 0; i < extra; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            pairs.push_back(pool[i]);
        }
    } else {
        while (pairs.size() < spec.edges) {
            auto a = static_cast<NodeId>(rng.below(n));
            auto b = static_cast<NodeId>(rng.below(n));
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (used.insert(key(a, b)).second) pairs.emplace_back(a, b);
        }
    }

    rng.shuffle(std::span(pairs));
    std::vector<BasicEdge<J>> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) edges.push_back({a, b, {}});
    return BasicGraph<J>(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Costs

/// Packet-loss probability to its additive form, -ln(1 - p).
inline double loss_to_additive(double p) {
    if (!(p >= 0.0 && p < 1.0))
        throw std::domain_error("loss probability must lie in [0, 1), got " + std::to_string(p));
    return -std::log1p(-p);
}

/// Inverse of loss_to_additive: p = 1 - exp(-x).
inline double additive_to_loss(double x) { return -std::expm1(-x); }

/// w1 * U(low1, high1) + w2 * U(low2, high2).
struct UniformMixture {
    double weight_1 = 1.0;
    double low_1 = 0.0;
    double high_1 = 0.0;
    double weight_2 = 0.0;
    double low_2 = 0.0;
    double high_2 = 0.0;

    void validate() const {
        if (!(weight_1 >= 0.0 && weight_2 >= 0.0) || std::abs(weight_1 + weight_2 - 1.0) > 1e-9)
            throw std::invalid_argument("mixture weights must be non-negative and sum to 1");
        if (!(low_1 <= high_1 && low_2 <= high_2))
            throw std::invalid_argument("mixture component has low > high");
        if (!(low_1 >= 0.0 && low_2 >= 0.0) || !std::isfinite(high_1) || !std::isfinite(high_2))
            throw std::invalid_argument("mixture bounds must be finite and non-negative");
    }

    double mean() const noexcept {
        return weight_1 * 0.5 * (low_1 + high_1) + weight_2 * 0.5 * (low_2 + high_2);
    }

    double max() const noexcept { return std::max(high_1, high_2); }

    /// One draw picks the component, a second draws the value.
    double sample(Rng& rng) const noexcept {
        if (rng.uniform() < weight_1) return rng.uniform(low_1, high_1);
        return rng.uniform(low_2, high_2);
    }

    static constexpr UniformMixture point(double c) noexcept { return {1.0, c, c, 0.0, c, c}; }
};

/// Per-attribute edge-cost distribution. When `first_is_loss` is set,
/// attribute 0 is drawn as a probability and stored via loss_to_additive.
template <std::size_t J>
struct BasicCostDistribution {
    std::array<UniformMixture, J> attributes{};
    bool first_is_loss = true;

    void validate() const {
        for (const auto& m : attributes) m.validate();
        // U(low, high) never returns high, so high == 1 is fine as long as low < 1.
        const UniformMixture& loss = attributes[0];
        if (first_is_loss && (loss.max() > 1.0 || loss.low_1 >= 1.0 || loss.low_2 >= 1.0))
            throw std::invalid_argument("loss probabilities must stay below 1");
    }
};

using CostDistribution = BasicCostDistribution<kDefaultAttributes>;

/// Default link-cost mixtures: loss probability, latency (ms) and jitter (ms).
inline CostDistribution reference_cost_distribution() {
    constexpr double third = 1.0 / 3.0;
    constexpr double two_thirds = 2.0 / 3.0;
    CostDistribution d;
    d.attributes[kLoss] = {third, 0.0005, 0.1, two_thirds, 0.0, 0.0005};
    d.attributes[kLatency] = {third, 5.0, 10.0, two_thirds, 1.0, 5.0};
    d.attributes[kJitter] = {third, 3.0, 5.0, two_thirds, 1.0, 3.0};
    return d;
}

/// Draws an independent cost vector for every edge, in edge-id order.
template <std::size_t J>
BasicGraph<J> sample_costs(const BasicGraph<J>& graph, const BasicCostDistribution<J>& dist,
                           std::uint64_t seed) {
    dist.validate();
    Rng rng(seed);
    std::vector<BasicCostVector<J>> costs(graph.edge_count());
    for (auto& cost : costs) {
        for (std::size_t j = 0; j < J; ++j) {
            const double x = dist.attributes[j].sample(rng);
            cost[j] = (j == 0 && dist.first_is_loss) ? loss_to_additive(x) : x;
        }
    }
    return graph.with_costs(costs);
}

}  // namespace mosp
