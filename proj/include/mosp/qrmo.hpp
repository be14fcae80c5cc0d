#pragma once

// Multi-objective Q-routing.
//
// The agent keeps one cost-to-go estimate per attribute for every
// (node, outgoing edge) pair and walks from the start node to the end node
// once per episode. Actions are picked epsilon-greedily, where "greedy"
// means the edge that wins the most pairwise per-attribute comparisons
// against its siblings. After every episode the route is offered to a
// per-attribute memory that keeps the best route seen for each attribute,
// so a run always yields J solutions.

#include "graph.hpp"
#include "pareto.hpp"
#include "rng.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mosp {

/// Q-values keyed by arc (node, outgoing edge).
template <std::size_t J>
class BasicQTable {
public:
    using Cost = BasicCostVector<J>;

    BasicQTable() = default;

    explicit BasicQTable(const BasicGraph<J>& graph, double initial = 0.0) : values_(graph.arc_count()) {
        for (auto& v : values_) v.values.fill(initial);
    }

    Cost& operator[](ArcId arc) noexcept { return values_[arc]; }
    const Cost& operator[](ArcId arc) const noexcept { return values_[arc]; }

    Cost& at(const BasicGraph<J>& graph, NodeId state, EdgeId action) {
        return values_.at(graph.arc(state, action));
    }
    const Cost& at(const BasicGraph<J>& graph, NodeId state, EdgeId action) const {
        return values_.at(graph.arc(state, action));
    }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Cost> values() const noexcept { return values_; }

    bool all_valid() const noexcept {
        for (const Cost& v : values_)
            if (!v.is_valid()) return false;
        return true;
    }

    friend bool operator==(const BasicQTable&, const BasicQTable&) = default;

private:
    std::vector<Cost> values_;
};

using QTable = BasicQTable<kDefaultAttributes>;

struct QrmoConfig {
    double alpha = 0.7;
    double epsilon = 0.1;
    std::size_t episodes = 100;
    /// Step budget per episode; 0 selects 50 * |V|.
    std::size_t max_steps = 0;
    std::uint64_t seed = 0;
    /// Q-routing never discounts future cost.
    static constexpr double gamma = 1.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    }

    std::size_t step_budget(std::size_t node_count) const noexcept {
        return max_steps != 0 ? max_steps : 50 * node_count;
    }
};

/// Edges the agent may take from `state`: every incident edge except the
/// one it arrived on. At a dead end the incoming edge is the only option.
template <std::size_t J>
std::vector<EdgeId> admissible_actions(const BasicGraph<J>& graph, NodeId state,
                                       std::optional<EdgeId> incoming) {
    const auto inc = graph.incident(state);
    if (inc.empty()) throw std::logic_error("node " + std::to_string(state) + " has no incident edges");
    std::vector<EdgeId> actions;
    actions.reserve(inc.size());
    for (const Incidence& i : inc)
        if (!incoming || i.edge != *incoming) actions.push_back(i.edge);
    if (actions.empty()) actions.push_back(*incoming);
    return actions;
}

/// Pairwise dominance scores over `actions` (ascending edge ids).
///
/// For each pair (x, y) with x before y and each attribute j, x scores when
/// Q_j(x) <= Q_j(y), otherwise y scores.
template <std::size_t J>
std::vector<std::size_t> dominance_scores(const BasicGraph<J>& graph, const BasicQTable<J>& q, NodeId state,
                                          std::span<const EdgeId> actions) {
    std::vector<std::size_t> score(actions.size(), 0);
    for (std::size_t x = 0; x < actions.size(); ++x) {
        const auto& qx = q[graph.arc(state, actions[x])];
        for (std::size_t y = x + 1; y < actions.size(); ++y) {
            const auto& qy = q[graph.arc(state, actions[y])];
            for (std::size_t j = 0; j < J; ++j) {
                if (qx[j] <= qy[j])
                    ++score[x];
                else
                    ++score[y];
            }
        }
    }
    return score;
}

/// Greedy action: highest dominance score, smallest edge id on ties.
template <std::size_t J>
EdgeId dominance_selection(const BasicGraph<J>& graph, const BasicQTable<J>& q, NodeId state,
                           std::optional<EdgeId> incoming) {
    const auto actions = admissible_actions(graph, state, incoming);
    const auto score = dominance_scores<J>(graph, q, state, actions);
    std::size_t best = 0;
    for (std::size_t i = 1; i < actions.size(); ++i)
        if (score[i] > score[best]) best = i;
    return actions[best];
}

/// Q(state, action) <- (1 - alpha) Q(state, action) + alpha (cost + future),
/// per attribute. future_j is 0 at the end node and otherwise the minimum
/// Q_j over the actions admissible at next_state after arriving via
/// `action`, i.e. every other incident edge, or `action` itself at a dead
/// end.
template <std::size_t J>
void update_q(const BasicGraph<J>& graph, BasicQTable<J>& q, NodeId state, EdgeId action,
              const BasicCostVector<J>& edge_cost, NodeId next_state, NodeId end_node, double alpha) {
    BasicCostVector<J> future{};
    if (next_state != end_node) {
        future = BasicCostVector<J>::infinity();
        for (const Incidence& inc : graph.incident(next_state)) {
            if (inc.edge == action && graph.degree(next_state) > 1) continue;
            const auto& qn = q[graph.arc(next_state, inc.edge)];
            for (std::size_t j = 0; j < J; ++j) future[j] = std::min(future[j], qn[j]);
        }
    }
    auto& target = q[graph.arc(state, action)];
    for (std::size_t j = 0; j < J; ++j)
        target[j] = (1.0 - alpha) * target[j] + alpha * (edge_cost[j] + future[j]);
}

struct EpisodeResult {
    Route route;
    /// Step budget ran out before reaching the end node.
    bool truncated = false;
};

/// One episode from src to dst, updating `q` online.
///
/// Each step draws u ~ U(0,1); when u < epsilon the action is uniform over
/// the admissible actions, otherwise dominance_selection picks it.
template <std::size_t J>
EpisodeResult run_episode(const BasicGraph<J>& graph, BasicQTable<J>& q, NodeId src, NodeId dst,
                          const QrmoConfig& config, Rng& rng) {
    EpisodeResult result{Route::start_at(src), false};
    const std::size_t budget = config.step_budget(graph.node_count());
    NodeId state = src;
    std::optional<EdgeId> incoming;
    while (state != dst) {
        if (result.route.hops() >= budget) {
            result.truncated = true;
            break;
        }
        EdgeId action;
        if (rng.uniform() < config.epsilon) {
            const auto actions = admissible_actions(graph, state, incoming);
            action = actions[rng.below(actions.size())];
        } else {
            action = dominance_selection(graph, q, state, incoming);
        }
        const auto& edge = graph.edge(action);
        const NodeId next = edge.other(state);
        update_q(graph, q, state, action, edge.cost, next, dst, config.alpha);
        result.route.append(action, next);
        incoming = action;
        state = next;
    }
    return result;
}

/// Follows dominance_selection from src without learning. Used to replay a
/// trained table.
template <std::size_t J>
EpisodeResult greedy_route(const BasicGraph<J>& graph, const BasicQTable<J>& q, NodeId src, NodeId dst,
                           std::size_t max_steps) {
    EpisodeResult result{Route::start_at(src), false};
    NodeId state = src;
    std::optional<EdgeId> incoming;
    while (state != dst) {
        if (result.route.hops() >= max_steps) {
            result.truncated = true;
            break;
        }
        const EdgeId action = dominance_selection(graph, q, state, incoming);
        const NodeId next = graph.edge(action).other(state);
        result.route.append(action, next);
        incoming = action;
        state = next;
    }
    return result;
}

/// Best route found so far for each attribute.
template <std::size_t J>
struct BasicBestMemory {
    struct Slot {
        Route route;
        BasicCostVector<J> cost = BasicCostVector<J>::infinity();
        BasicQTable<J> q_snapshot;
        std::optional<std::size_t> episode_found;

        bool filled() const noexcept { return episode_found.has_value(); }
    };

    std::array<Slot, J> slots{};

    bool complete() const noexcept {
        for (const Slot& s : slots)
            if (!s.filled()) return false;
        return true;
    }

    /// Current cost vector of every slot (infinite while unfilled).
    std::array<BasicCostVector<J>, J> costs() const {
        std::array<BasicCostVector<J>, J> out;
        for (std::size_t j = 0; j < J; ++j) out[j] = slots[j].cost;
        return out;
    }
};

using BestMemory = BasicBestMemory<kDefaultAttributes>;

/// Offers a completed route to the memory. Slot j is replaced when the
/// route's j-th cost is strictly below the stored one. Returns whether any
/// slot changed.
template <std::size_t J>
bool update_best_path(BasicBestMemory<J>& memory, const Route& route, const BasicGraph<J>& graph,
                      const BasicQTable<J>& q, std::size_t episode) {
    const auto cost = route_cost(graph, route);
    bool changed = false;
    for (std::size_t j = 0; j < J; ++j) {
        auto& slot = memory.slots[j];
        if (cost[j] < slot.cost[j]) {
            slot.route = route;
            slot.cost = cost;
            slot.q_snapshot = q;
            slot.episode_found = episode;
            changed = true;
        }
    }
    return changed;
}

template <std::size_t J>
struct BasicQrmoResult {
    BasicBestMemory<J> memory;
    /// Slot costs after each episode; trace[i] belongs to episode i + 1.
    std::vector<std::array<BasicCostVector<J>, J>> trace;
    std::vector<bool> truncated;
    BasicQTable<J> q_final;
};

using QrmoResult = BasicQrmoResult<kDefaultAttributes>;

/// Full learning run: zero-initialised Q-table, config.episodes episodes,
/// exploration seeded with config.seed. Truncated episodes keep their
/// Q-updates but never enter the memory.
template <std::size_t J>
BasicQrmoResult<J> qrmo_run(const BasicGraph<J>& graph, NodeId src, NodeId dst, const QrmoConfig& config) {
    config.validate();
    if (src >= graph.node_count() || dst >= graph.node_count())
        throw std::invalid_argument("endpoint not in graph");
    if (src == dst) throw std::invalid_argument("start and end node must differ");

    BasicQrmoResult<J> result;
    result.q_final = BasicQTable<J>(graph);
    result.trace.reserve(config.episodes);
    result.truncated.reserve(config.episodes);
    Rng rng(config.seed);
    for (std::size_t episode = 1; episode <= config.episodes; ++episode) {
        auto outcome = run_episode(graph, result.q_final, src, dst, config, rng);
        if (!outcome.truncated) update_best_path(result.memory, outcome.route, graph, result.q_final, episode);
        result.trace.push_back(result.memory.costs());
        result.truncated.push_back(outcome.truncated);
    }
    return result;
}

template <std::size_t J>
struct BasicSolution {
    Route route;
    BasicCostVector<J> cost;
};

using Solution = BasicSolution<kDefaultAttributes>;

/// The J slot solutions, duplicates kept; nullopt if any slot is still empty.
template <std::size_t J>
std::optional<std::vector<BasicSolution<J>>> extract_solutions(const BasicBestMemory<J>& memory) {
    if (!memory.complete()) return std::nullopt;
    std::vector<BasicSolution<J>> out;
    out.reserve(J);
    for (const auto& slot : memory.slots) out.push_back({slot.route, slot.cost});
    return out;
}

/// Debug dump: state,edge,q_loss,q_latency,q_jitter.
template <std::size_t J>
void write_qtable_csv(std::ostream& out, const BasicGraph<J>& graph, const BasicQTable<J>& q) {
    out << "state,edge";
    if constexpr (J == kDefaultAttributes) {
        out << ",q_loss,q_latency,q_jitter";
    } else {
        for (std::size_t j = 0; j < J; ++j) out << ",q_" << j;
    }
    out << '\n';
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        for (const Incidence& inc : graph.incident(n)) {
            out << n << ',' << inc.edge;
            for (double v : q[graph.arc(n, inc.edge)]) out << ',' << format_real(v);
            out << '\n';
        }
    }
}

}  // namespace mosp
