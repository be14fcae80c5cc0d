// mosp: generate graphs, compute exact Pareto sets, run Q-routing and
// reproduce the benchmark protocol from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error.

#include "mosp/mosp.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes to `path`, or stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    fn(out);
}

void check_node(const mosp::Graph& g, mosp::NodeId n, const char* what) {
    if (n >= g.node_count())
        throw DataError(std::string(what) + " node " + std::to_string(n) + " not in graph of " +
                        std::to_string(g.node_count()) + " nodes");
}

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& part : mosp::detail::split(s, ", "))
        out.push_back(static_cast<std::size_t>(mosp::detail::parse_unsigned(part)));
    return out;
}

void print_solutions(const mosp::QrmoResult& r) {
    const char* names[] = {"loss", "latency", "jitter"};
    for (std::size_t j = 0; j < r.memory.slots.size(); ++j) {
        const auto& s = r.memory.slots[j];
        if (!s.filled()) {
            std::printf("best %-8s no solution found\n", names[j]);
            continue;
        }
        std::printf("best %-8s episode %3zu  cost (%.6g, %.6g, %.6g)  path %s\n", names[j], *s.episode_found,
                    s.cost[0], s.cost[1], s.cost[2], mosp::join_nodes(s.route.nodes).c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective routing: exact Pareto sets and multi-objective Q-routing"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random connected graph with sampled costs");
    std::string gen_spec, gen_out;
    std::uint64_t gen_seed = 1;
    gen->add_option("--spec", gen_spec, "Topology: 25N50E, 100N150E, MCC, 50N50E, or V,E")->required();
    gen->add_option("--seed", gen_seed, "Master seed (same derivation as 'bench')");
    gen->add_option("--out", gen_out, "Output graph file (default stdout)");

    // mda
    auto* mda = app.add_subcommand("mda", "Exact Pareto set between two nodes");
    std::string mda_graph, mda_out;
    mosp::NodeId mda_src = 0, mda_dst = 0;
    mda->add_option("--graph", mda_graph, "Graph file")->required();
    mda->add_option("--src", mda_src, "Source node")->required();
    mda->add_option("--dst", mda_dst, "Destination node")->required();
    mda->add_option("--out", mda_out, "Pareto set CSV (default stdout)");

    // qrmo
    auto* qrmo = app.add_subcommand("qrmo", "Learn routes with multi-objective Q-routing");
    std::string q_graph, q_out, q_dump, q_solutions;
    mosp::NodeId q_src = 0, q_dst = 0;
    mosp::QrmoConfig q_config;
    bool q_replay = false;
    qrmo->add_option("--graph", q_graph, "Graph file")->required();
    qrmo->add_option("--src", q_src, "Start node")->required();
    qrmo->add_option("--dst", q_dst, "End node")->required();
    qrmo->add_option("--episodes", q_config.episodes, "Number of episodes")->capture_default_str();
    qrmo->add_option("--alpha", q_config.alpha, "Learning rate")->capture_default_str();
    qrmo->add_option("--epsilon", q_config.epsilon, "Exploration probability")->capture_default_str();
    qrmo->add_option("--seed", q_config.seed, "Exploration seed")->capture_default_str();
    qrmo->add_option("--max-steps", q_config.max_steps, "Steps per episode (0 = 50 * nodes)")->capture_default_str();
    qrmo->add_option("--out", q_out, "Per-episode trace CSV (default stdout)");
    qrmo->add_option("--q-dump", q_dump, "Write the final Q-table as CSV");
    qrmo->add_option("--solutions", q_solutions, "Write the final per-attribute routes as CSV");
    qrmo->add_flag("--replay-greedy", q_replay, "After learning, replay the greedy policy once and time it");

    // bench
    auto* bench = app.add_subcommand("bench", "Run the full experiment protocol from a config file");
    std::string b_config, b_out;
    std::vector<std::string> b_overrides;
    std::size_t b_threads = std::max(1u, std::thread::hardware_concurrency());
    bench->add_option("--config", b_config, "Key-value config file")->required();
    bench->add_option("--out-dir", b_out, "Output directory")->required();
    bench->add_option("--set", b_overrides, "Override a config key (key=value), repeatable");
    bench->add_option("--threads", b_threads, "Worker threads")->capture_default_str();

    // plot
    auto* plot = app.add_subcommand("plot", "Render SVG charts from a bench output directory");
    std::string p_in, p_out, p_checkpoints = "10,20,50,100";
    plot->add_option("--in-dir", p_in, "Directory holding aggregate.csv")->required();
    plot->add_option("--out-dir", p_out, "Where to write SVG files (default: --in-dir)");
    plot->add_option("--checkpoints", p_checkpoints, "Episodes shown in the bar charts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (*gen) {
            mosp::ExperimentConfig config;
            config.topology = mosp::TopologySpec::parse(gen_spec);
            config.seed = gen_seed;
            const auto graph = mosp::experiment_graph(config);
            with_output(gen_out, [&](std::ostream& out) {
                out << "# " << config.topology.label() << " seed " << gen_seed << '\n';
                mosp::write_graph(out, graph);
            });
        } else if (*mda) {
            const auto graph = mosp::load_graph(mda_graph);
            check_node(graph, mda_src, "source");
            check_node(graph, mda_dst, "destination");
            mosp::MdaStats stats;
            const auto set = mosp::mda_pareto(graph, mda_src, mda_dst, &stats);
            if (!stats.diagnostic.empty()) throw DataError(stats.diagnostic);
            with_output(mda_out, [&](std::ostream& out) { mosp::write_pareto_csv(out, set); });
            std::cerr << set.size() << " Pareto-optimal paths, " << stats.labels_created << " labels\n";
        } else if (*qrmo) {
            const auto graph = mosp::load_graph(q_graph);
            check_node(graph, q_src, "start");
            check_node(graph, q_dst, "end");
            const auto result = mosp::qrmo_run(graph, q_src, q_dst, q_config);
            with_output(q_out, [&](std::ostream& out) {
                out << "episode,slot";
                for (const auto& n : mosp::cost_column_names<mosp::kDefaultAttributes>()) out << ',' << n;
                out << ",truncated\n";
                for (std::size_t e = 0; e < result.trace.size(); ++e)
                    for (std::size_t j = 0; j < result.trace[e].size(); ++j) {
                        out << e + 1 << ',' << j;
                        for (double c : result.trace[e][j]) out << ',' << mosp::format_real(c);
                        out << ',' << (result.truncated[e] ? 1 : 0) << '\n';
                    }
            });
            if (!q_dump.empty())
                with_output(q_dump, [&](std::ostream& out) { mosp::write_qtable_csv(out, graph, result.q_final); });
            if (!q_solutions.empty()) {
                const auto solutions = mosp::extract_solutions(result.memory);
                if (!solutions) throw DataError("no solution found: no episode reached the end node");
                with_output(q_solutions, [&](std::ostream& out) {
                    out << "slot,path_nodes";
                    for (const auto& n : mosp::cost_column_names<mosp::kDefaultAttributes>()) out << ',' << n;
                    out << '\n';
                    for (std::size_t j = 0; j < solutions->size(); ++j) {
                        out << j << ',' << mosp::join_nodes((*solutions)[j].route.nodes);
                        for (double c : (*solutions)[j].cost) out << ',' << mosp::format_real(c);
                        out << '\n';
                    }
                });
            }
            if (q_out.empty() || q_out == "-") std::cout.flush();
            print_solutions(result);
            if (q_replay) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto replay = mosp::greedy_route(graph, result.q_final, q_src, q_dst,
                                                       q_config.step_budget(graph.node_count()));
                const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                if (replay.truncated) {
                    std::printf("greedy replay: did not reach node %u (%.3f ms)\n", q_dst, ms);
                } else {
                    const auto c = mosp::route_cost(graph, replay.route);
                    std::printf("greedy replay: %zu hops, cost (%.6g, %.6g, %.6g), %.3f ms, path %s\n",
                                replay.route.hops(), c[0], c[1], c[2], ms,
                                mosp::join_nodes(replay.route.nodes).c_str());
                }
            }
        } else if (*bench) {
            mosp::ConfigBuilder builder;
            {
                std::ifstream in(b_config);
                if (!in) throw DataError("cannot open config '" + b_config + "'");
                builder.read(in);
            }
            for (const auto& o : b_overrides) builder.set(o);
            const auto configs = builder.build();
            std::vector<mosp::ExperimentResult> results;
            for (const auto& c : configs) {
                results.push_back(mosp::run_experiment(c, b_threads));
                const auto& r = results.back();
                std::printf("%s: %zu instances%s\n", r.topology.c_str(), r.instances.size(),
                            r.incomplete ? " (INCOMPLETE)" : "");
                for (const auto& inst : r.instances)
                    if (!inst.completed) std::printf("  instance %zu failed: %s\n", inst.instance, inst.diagnostic.c_str());
                for (std::size_t cp : r.checkpoints) {
                    const auto& a = r.at_episode(cp);
                    std::printf("  episode %3zu  dps %.3g +/- %.2g  correctness %.2f +/- %.2f  num_correct %.2f +/- %.2f\n",
                                cp, a.dps.mean, a.dps.ci_halfwidth, a.correctness.mean, a.correctness.ci_halfwidth,
                                a.num_correct.mean, a.num_correct.ci_halfwidth);
                }
            }
            if (results.size() == 1) {
                mosp::emit_csv(results.front(), b_out);
            } else {
                mosp::emit_batch_csv(results, b_out);
            }
            std::printf("wrote %s\n", b_out.c_str());
        } else if (*plot) {
            const std::filesystem::path in_dir(p_in);
            std::ifstream in(in_dir / "aggregate.csv");
            if (!in) throw DataError("no aggregate.csv in '" + p_in + "'");
            const auto rows = mosp::read_aggregate_csv(in);
            const auto checkpoints = parse_list(p_checkpoints);
            const auto files = mosp::emit_plots(rows, p_out.empty() ? in_dir : std::filesystem::path(p_out), checkpoints);
            for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}
