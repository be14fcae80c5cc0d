#pragma once

#include "cost_vector.hpp"
#include "graph.hpp"
#include "graph_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mosp {

/// A walk through the graph: nodes[i] and nodes[i+1] are joined by edges[i].
/// Traces recorded during learning may revisit nodes; Pareto-set members
/// are always simple (see is_simple()).
struct Route {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;

    static Route start_at(NodeId node) { return Route{{node}, {}}; }

    void append(EdgeId e, NodeId next) {
        edges.push_back(e);
        nodes.push_back(next);
    }

    bool empty() const noexcept { return nodes.empty(); }
    NodeId source() const { return nodes.front(); }
    NodeId target() const { return nodes.back(); }
    std::size_t hops() const noexcept { return edges.size(); }

    bool is_simple() const {
        std::vector<NodeId> sorted = nodes;
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }

    friend bool operator==(const Route&, const Route&) = default;
};

/// Route with no repeated node; the form every Pareto-set member takes.
using SimplePath = Route;

/// Throws std::invalid_argument unless consecutive nodes are joined by the
/// recorded edges (std::out_of_range for unknown edge ids).
template <std::size_t J>
void validate_route(const BasicGraph<J>& graph, const Route& route) {
    if (route.nodes.empty() || route.nodes.size() != route.edges.size() + 1)
        throw std::invalid_argument("route must have exactly one more node than edges");
    for (std::size_t i = 0; i < route.edges.size(); ++i) {
        const auto& e = graph.edge(route.edges[i]);
        const NodeId a = route.nodes[i], b = route.nodes[i + 1];
        if (!((e.u == a && e.v == b) || (e.u == b && e.v == a)))
            throw std::invalid_argument("edge " + std::to_string(route.edges[i]) + " does not join nodes " +
                                        std::to_string(a) + " and " + std::to_string(b));
    }
}

/// Component-wise sum of the edge costs along the route, in route order.
template <std::size_t J>
BasicCostVector<J> route_cost(const BasicGraph<J>& graph, const Route& route) {
    BasicCostVector<J> total{};
    for (EdgeId e : route.edges) total += graph.edge(e).cost;
    return total;
}

/// Strict Pareto dominance: a <= b everywhere and a < b somewhere.
template <std::size_t J>
constexpr bool dominates(const BasicCostVector<J>& a, const BasicCostVector<J>& b) noexcept {
    bool strict = false;
    for (std::size_t j = 0; j < J; ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strict = true;
    }
    return strict;
}

/// a dominates b or a == b.
template <std::size_t J>
constexpr bool weakly_dominates(const BasicCostVector<J>& a, const BasicCostVector<J>& b) noexcept {
    for (std::size_t j = 0; j < J; ++j)
        if (a[j] > b[j]) return false;
    return true;
}

template <std::size_t J>
constexpr bool within_tolerance(const BasicCostVector<J>& a, const BasicCostVector<J>& b,
                                double tol) noexcept {
    for (std::size_t j = 0; j < J; ++j)
        if (!(std::abs(a[j] - b[j]) <= tol)) return false;
    return true;
}

inline constexpr double kDefaultCostTolerance = 1e-9;

/// Mutually non-dominated (path, cost) pairs, canonicalised by cost: of
/// several paths with identical cost vectors only the first one inserted is
/// kept.
template <std::size_t J>
class BasicParetoSet {
public:
    using Cost = BasicCostVector<J>;

    struct Entry {
        SimplePath path;
        Cost cost;
    };

    /// Adds the candidate unless an entry dominates or equals its cost;
    /// evicts entries the candidate dominates. Returns whether it was added.
    bool insert(SimplePath path, const Cost& cost) {
        for (const Entry& e : entries_)
            if (weakly_dominates(e.cost, cost)) return false;
        std::erase_if(entries_, [&](const Entry& e) { return dominates(cost, e.cost); });
        entries_.push_back({std::move(path), cost});
        return true;
    }

    /// True if some entry matches `cost` within `tol` in every component.
    bool contains_cost(const Cost& cost, double tol = kDefaultCostTolerance) const noexcept {
        return std::any_of(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return within_tolerance(e.cost, cost, tol); });
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const Entry> entries() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    /// Cost vectors in lexicographic order.
    std::vector<Cost> costs() const {
        std::vector<Cost> out;
        out.reserve(entries_.size());
        for (const Entry& e : entries_) out.push_back(e.cost);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<Entry> entries_;
};

using ParetoSet = BasicParetoSet<kDefaultAttributes>;

/// Cost-vector sets equal up to `tol` per component (as multisets of
/// lexicographically sorted costs).
template <std::size_t J>
bool same_costs(const BasicParetoSet<J>& a, const BasicParetoSet<J>& b,
                double tol = kDefaultCostTolerance) {
    if (a.size() != b.size()) return false;
    const auto ca = a.costs(), cb = b.costs();
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (!within_tolerance(ca[i], cb[i], tol)) return false;
    return true;
}

inline std::string join_nodes(std::span<const NodeId> nodes) {
    std::string s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(nodes[i]);
    }
    return s;
}

template <std::size_t J>
std::vector<std::string> cost_column_names() {
    if constexpr (J == kDefaultAttributes) {
        return {"loss_additive", "latency_ms", "jitter_ms"};
    } else {
        std::vector<std::string> names;
        for (std::size_t j = 0; j < J; ++j) names.push_back("cost_" + std::to_string(j));
        return names;
    }
}

/// CSV: path_nodes,loss_additive,latency_ms,jitter_ms (rows in set order).
template <std::size_t J>
void write_pareto_csv(std::ostream& out, const BasicParetoSet<J>& set) {
    out << "path_nodes";
    for (const auto& name : cost_column_names<J>()) out << ',' << name;
    out << '\n';
    for (const auto& e : set) {
        out << join_nodes(e.path.nodes);
        for (double c : e.cost) out << ',' << format_real(c);
        out << '\n';
    }
}

}  // namespace mosp
