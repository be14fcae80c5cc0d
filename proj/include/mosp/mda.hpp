#pragma once

// Exact one-to-one Pareto sets: a multi-objective label-setting Dijkstra
// and an exhaustive simple-path enumerator used to check it.

#include "graph.hpp"
#include "pareto.hpp"

#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace mosp {

struct MdaStats {
    std::size_t labels_created = 0;
    std::size_t labels_popped = 0;
    /// Largest number of live labels held by one node when the search ended.
    std::size_t max_labels_per_node = 0;
    /// Non-empty when the destination could not be reached.
    std::string diagnostic;
};

namespace detail {

template <std::size_t J>
void check_endpoints(const BasicGraph<J>& graph, NodeId src, NodeId dst) {
    if (src >= graph.node_count() || dst >= graph.node_count())
        throw std::invalid_argument("endpoint not in graph");
    if (src == dst) throw std::invalid_argument("source and destination must differ");
}

}  // namespace detail

/// Pareto set of simple src -> dst paths.
///
/// Labels are popped in lexicographic cost order. A new label survives at a
/// node only if no label already there dominates or equals it; labels it
/// dominates are killed (and skipped when they reach the queue head).
/// Labels that would step onto a node already on their own predecessor
/// chain are discarded. Costs must be non-negative, which BasicGraph
/// guarantees.
template <std::size_t J>
BasicParetoSet<J> mda_pareto(const BasicGraph<J>& graph, NodeId src, NodeId dst,
                             MdaStats* stats = nullptr) {
    using Cost = BasicCostVector<J>;
    detail::check_endpoints(graph, src, dst);

    struct Label {
        Cost cost;
        NodeId node;
        EdgeId via;
        std::optional<std::size_t> pred;  // index into `labels`
        bool alive;
    };
    struct QueueItem {
        Cost cost;
        std::size_t label;
        bool operator>(const QueueItem& o) const {
            if (cost != o.cost) return cost > o.cost;
            return label > o.label;
        }
    };

    std::vector<Label> labels;
    std::vector<std::vector<std::size_t>> at_node(graph.node_count());
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
    MdaStats local;

    labels.push_back({Cost{}, src, 0, std::nullopt, true});
    at_node[src].push_back(0);
    queue.push({Cost{}, 0});
    local.labels_created = 1;

    auto on_chain = [&](std::size_t label, NodeId node) {
        for (std::optional<std::size_t> l = label; l; l = labels[*l].pred)
            if (labels[*l].node == node) return true;
        return false;
    };

    while (!queue.empty()) {
        const QueueItem top = queue.top();
        queue.pop();
        if (!labels[top.label].alive) continue;
        ++local.labels_popped;
        const NodeId node = labels[top.label].node;
        if (node == dst) continue;  // a simple path cannot leave its destination

        for (const Incidence& inc : graph.incident(node)) {
            const NodeId next = inc.neighbor;
            if (on_chain(top.label, next)) continue;
            const Cost cost = labels[top.label].cost + graph.edge(inc.edge).cost;

            auto& list = at_node[next];
            bool rejected = false;
            for (std::size_t l : list)
                if (weakly_dominates(labels[l].cost, cost)) {
                    rejected = true;
                    break;
                }
            if (rejected) continue;
            std::erase_if(list, [&](std::size_t l) {
                if (!dominates(cost, labels[l].cost)) return false;
                labels[l].alive = false;
                return true;
            });
            const std::size_t id = labels.size();
            labels.push_back({cost, next, inc.edge, top.label, true});
            list.push_back(id);
            queue.push({cost, id});
            ++local.labels_created;
        }
    }

    BasicParetoSet<J> result;
    for (std::size_t l : at_node[dst]) {
        Route path;
        for (std::optional<std::size_t> cur = l; cur; cur = labels[*cur].pred) {
            path.nodes.push_back(labels[*cur].node);
            if (labels[*cur].pred) path.edges.push_back(labels[*cur].via);
        }
        std::reverse(path.nodes.begin(), path.nodes.end());
        std::reverse(path.edges.begin(), path.edges.end());
        result.insert(std::move(path), labels[l].cost);
    }

    for (const auto& list : at_node) local.max_labels_per_node = std::max(local.max_labels_per_node, list.size());
    if (result.empty())
        local.diagnostic = "node " + std::to_string(dst) + " is unreachable from node " + std::to_string(src);
    if (stats) *stats = std::move(local);
    return result;
}

inline constexpr std::size_t kBruteForceNodeLimit = 14;

/// Enumerates every simple src -> dst path by depth-first search and keeps
/// the non-dominated ones. Exponential; refuses graphs above `node_limit`
/// nodes with std::length_error.
template <std::size_t J>
BasicParetoSet<J> brute_force_pareto(const BasicGraph<J>& graph, NodeId src, NodeId dst,
                                     std::size_t node_limit = kBruteForceNodeLimit) {
    using Cost = BasicCostVector<J>;
    detail::check_endpoints(graph, src, dst);
    if (graph.node_count() > node_limit)
        throw std::length_error("brute-force enumeration refused: " + std::to_string(graph.node_count()) +
                                " nodes exceeds the limit of " + std::to_string(node_limit));

    BasicParetoSet<J> result;
    std::vector<char> on_path(graph.node_count(), 0);
    Route path = Route::start_at(src);
    on_path[src] = 1;

    // Explicit stack of (cost so far, next incidence position) per depth.
    struct Frame {
        Cost cost;
        std::size_t next;
    };
    std::vector<Frame> stack{{Cost{}, 0}};
    while (!stack.empty()) {
        Frame& frame = stack.back();
        const NodeId node = path.nodes.back();
        const auto inc = graph.incident(node);
        if (frame.next == inc.size()) {
            on_path[node] = 0;
            stack.pop_back();
            if (!path.edges.empty()) {
                path.edges.pop_back();
                path.nodes.pop_back();
            }
            continue;
        }
        const Incidence step = inc[frame.next++];
        if (on_path[step.neighbor]) continue;
        const Cost cost = frame.cost + graph.edge(step.edge).cost;
        if (step.neighbor == dst) {
            Route found = path;
            found.append(step.edge, dst);
            result.insert(std::move(found), cost);
            continue;
        }
        on_path[step.neighbor] = 1;
        path.append(step.edge, step.neighbor);
        stack.push_back({cost, 0});
    }
    return result;
}

}  // namespace mosp
