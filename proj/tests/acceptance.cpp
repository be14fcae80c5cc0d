// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// usage: acceptance <path-to-mosp-cli> <scratch-dir>

#include "mosp/mosp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace mosp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome mda_matches_oracle() {
    const auto t0 = Clock::now();
    Rng rng(derive_seed(kMasterSeed, Stream::kTopology, 1001));
    std::size_t mismatches = 0, total_points = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const std::size_t v = 4 + rng.below(9);
        const std::size_t e = (v - 1) + rng.below(TopologySpec::max_simple_edges(v) - (v - 1) + 1);
        TopologySpec spec{v, e, "", rng.next_u64()};
        const auto g = sample_costs(generate_topology(spec), reference_cost_distribution(), rng.next_u64());
        const auto src = static_cast<NodeId>(rng.below(v));
        auto dst = static_cast<NodeId>(rng.below(v - 1));
        if (dst >= src) ++dst;
        const auto exact = mda_pareto(g, src, dst);
        const auto brute = brute_force_pareto(g, src, dst);
        total_points += brute.size();
        if (!same_costs(exact, brute, 1e-9)) ++mismatches;
    }
    const double s = seconds_since(t0);
    return {mismatches == 0 && s < 60.0,
            fmt("200 graphs, %zu Pareto points, %zu mismatches, %.2f s (limit 60 s)", total_points, mismatches, s)};
}

Outcome dominance_algebra() {
    Rng rng(derive_seed(kMasterSeed, Stream::kCosts, 1002));
    auto draw = [&] {
        CostVector c;
        for (double& x : c) x = static_cast<double>(rng.below(4));
        return c;
    };
    std::size_t violations = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto a = draw(), b = draw(), c = draw();
        if (dominates(a, a)) ++violations;
        if (dominates(a, b) && dominates(b, a)) ++violations;
        if (dominates(a, b) && dominates(b, c) && !dominates(a, c)) ++violations;
    }
    std::size_t set_violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ParetoSet s;
        const auto n = 1 + rng.below(50);
        for (std::size_t k = 0; k < n; ++k) s.insert(Route::start_at(0), draw());
        const auto costs = s.costs();
        for (std::size_t x = 0; x < costs.size(); ++x)
            for (std::size_t y = 0; y < costs.size(); ++y)
                if (x != y && (dominates(costs[x], costs[y]) || costs[x] == costs[y])) ++set_violations;
    }
    return {violations == 0 && set_violations == 0,
            fmt("1e5 triples: %zu axiom violations; 1000 insert sequences: %zu dominated members", violations,
                set_violations)};
}

Outcome update_decomposition() {
    std::size_t trajectories = 0, steps = 0;
    double worst = 0.0;
    const double alpha = QrmoConfig{}.alpha;
    for (std::uint64_t g_seed = 0; g_seed < 10; ++g_seed) {
        TopologySpec spec{20, 40, "", derive_seed(kMasterSeed, Stream::kTopology, 2000 + g_seed)};
        const auto g = sample_costs(generate_topology(spec), reference_cost_distribution(),
                                    derive_seed(kMasterSeed, Stream::kCosts, 2000 + g_seed));
        const NodeId dst = 19;
        QrmoConfig config;
        Rng rng(derive_seed(kMasterSeed, Stream::kExploration, 2000 + g_seed));
        QTable q(g);
        // Scalar references: one map per attribute keyed by (state, edge).
        std::array<std::map<std::pair<NodeId, EdgeId>, double>, 3> ref;
        auto get = [&](std::size_t j, NodeId s, EdgeId e) {
            auto it = ref[j].find({s, e});
            return it == ref[j].end() ? 0.0 : it->second;
        };
        for (int t = 0; t < 10; ++t, ++trajectories) {
            const auto r = run_episode(g, q, 0, dst, config, rng);
            for (std::size_t i = 0; i < r.route.edges.size(); ++i, ++steps) {
                const NodeId s = r.route.nodes[i], next = r.route.nodes[i + 1];
                const EdgeId a = r.route.edges[i];
                for (std::size_t j = 0; j < 3; ++j) {
                    double future = 0.0;
                    if (next != dst) {
                        future = INFINITY;
                        for (const auto& inc : g.incident(next))
                            if (g.degree(next) == 1 || inc.edge != a) future = std::min(future, get(j, next, inc.edge));
                    }
                    ref[j][{s, a}] = (1.0 - alpha) * get(j, s, a) + alpha * (g.edge(a).cost[j] + future);
                }
            }
        }
        for (NodeId n = 0; n < g.node_count(); ++n)
            for (const auto& inc : g.incident(n))
                for (std::size_t j = 0; j < 3; ++j)
                    worst = std::max(worst, std::abs(q.at(g, n, inc.edge)[j] - get(j, n, inc.edge)));
    }
    return {worst <= 1e-12,
            fmt("%zu trajectories, %zu updates, max |vector - scalar| = %.3g (limit 1e-12)", trajectories, steps, worst)};
}

/// Cached protocol runs keyed by topology label.
const ExperimentResult& protocol(const std::string& topology) {
    static std::map<std::string, ExperimentResult> cache;
    auto it = cache.find(topology);
    if (it == cache.end()) {
        ExperimentConfig c;
        c.topology = TopologySpec::parse(topology);
        c.seed = kMasterSeed;
        const auto t0 = Clock::now();
        it = cache.emplace(topology, run_experiment(c, worker_count())).first;
        std::printf("  (ran %s protocol: %zu instances in %.2f s)\n", topology.c_str(), it->second.instances.size(),
                    seconds_since(t0));
    }
    return it->second;
}

std::string incomplete_note(const ExperimentResult& r) {
    return r.incomplete ? " [INCOMPLETE run]" : "";
}

Outcome low_degree_convergence() {
    const auto& r = protocol("50N50E");
    const double c50 = r.at_episode(50).correctness.mean, c100 = r.at_episode(100).correctness.mean;
    return {!r.incomplete && c50 >= 0.95 && c100 == 1.0,
            fmt("50N50E correctness: episode 50 = %.3f (>= 0.95), episode 100 = %.3f (== 1.0)%s", c50, c100,
                incomplete_note(r).c_str())};
}

Outcome high_degree_accuracy() {
    const auto& r = protocol("25N50E");
    const double c100 = r.at_episode(100).correctness.mean;
    return {!r.incomplete && c100 >= 0.75,
            fmt("25N50E correctness at episode 100 = %.3f (>= 0.75)%s", c100, incomplete_note(r).c_str())};
}

Outcome dps_trend() {
    const auto& dense = protocol("25N50E");
    const auto& sparse = protocol("50N50E");
    const double d10 = dense.at_episode(10).dps.mean, d100 = dense.at_episode(100).dps.mean;
    const double s50 = sparse.at_episode(50).dps.mean;
    const bool ok = !dense.incomplete && !sparse.incomplete && d100 <= 0.1 && d100 <= d10 && s50 <= 1e-3;
    return {ok, fmt("25N50E DPS: episode 10 = %.3g, episode 100 = %.3g (<= 0.1 and <= episode 10); "
                    "50N50E DPS at episode 50 = %.3g (<= 1e-3)",
                    d10, d100, s50)};
}

Outcome correct_solution_count() {
    const auto& r = protocol("100N150E");
    const double n100 = r.at_episode(100).num_correct.mean;
    return {!r.incomplete && n100 >= 2.0,
            fmt("100N150E num_correct at episode 100 = %.3f (>= 2.0)%s", n100, incomplete_note(r).c_str())};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism(const std::string& cli, const fs::path& scratch) {
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const auto config = scratch / "determinism.cfg";
    {
        std::ofstream out(config);
        out << "topology = 25N50E 100N150E MCC 50N50E\nseed = " << kMasterSeed << '\n';
    }
    for (const char* run : {"a", "b"}) {
        const std::string cmd = "\"" + cli + "\" bench --config \"" + config.string() + "\" --out-dir \"" +
                                (scratch / run).string() + "\" > \"" + (scratch / run).string() + ".log\" 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "mosp bench exited with an error: " + cmd};
    }
    std::vector<fs::path> files{"aggregate.csv"};
    for (const char* t : {"25N50E", "100N150E", "30N35E", "50N50E"}) {
        files.push_back(fs::path(t) / "metrics.csv");
        files.push_back(fs::path(t) / "aggregate.csv");
    }
    std::size_t differing = 0, bytes = 0;
    for (const auto& f : files) {
        const auto a = slurp(scratch / "a" / f), b = slurp(scratch / "b" / f);
        if (a.empty() || a != b) ++differing;
        bytes += a.size();
    }
    return {differing == 0, fmt("%zu CSV files (%zu bytes) compared, %zu differ", files.size(), bytes, differing)};
}

Outcome metric_self_consistency() {
    Rng rng(derive_seed(kMasterSeed, Stream::kCosts, 1009));
    double worst = 0.0;
    std::size_t zero_mismatch = 0, shared_cases = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<CostVector> psi(1 + rng.below(8)), omega(1 + rng.below(3));
        const bool coarse = trial % 2 == 0;
        for (auto* set : {&psi, &omega})
            for (auto& c : *set)
                for (double& x : c) x = coarse ? static_cast<double>(rng.below(3)) : rng.uniform(0.0, 20.0);
        if (trial % 5 == 0) omega[rng.below(omega.size())] = psi[rng.below(psi.size())];

        CostVector f{};
        for (const auto* set : {&psi, &omega})
            for (const auto& c : *set)
                for (std::size_t j = 0; j < 3; ++j) f[j] = std::max(f[j], c[j]);
        for (double& x : f)
            if (x == 0.0) x = 1.0;
        double oracle = INFINITY;
        bool shared = false;
        for (const auto& a : psi)
            for (const auto& b : omega) {
                double sum = 0.0;
                for (std::size_t j = 0; j < 3; ++j) sum += std::pow(a[j] / f[j] - b[j] / f[j], 2);
                oracle = std::min(oracle, std::sqrt(sum));
                shared = shared || a == b;
            }
        const double d = dps<3>(psi, omega);
        worst = std::max(worst, std::abs(d - oracle));
        if ((d == 0.0) != shared) ++zero_mismatch;
        shared_cases += shared;
    }
    return {worst <= 1e-12 && zero_mismatch == 0,
            fmt("1000 set pairs (%zu sharing a vector): max |dps - oracle| = %.3g, %zu zero/shared mismatches", shared_cases,
                worst, zero_mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <mosp-cli> <scratch-dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 MDA equals brute-force oracle", mda_matches_oracle},
        {"2 dominance algebra", dominance_algebra},
        {"3 Q-update decomposition", update_decomposition},
        {"4 low-degree convergence (50N50E)", low_degree_convergence},
        {"5 high-degree accuracy (25N50E)", high_degree_accuracy},
        {"6 DPS trend", dps_trend},
        {"7 correct-solution count (100N150E)", correct_solution_count},
        {"8 bench determinism", [&] { return cli_determinism(cli, scratch); }},
        {"9 metric self-consistency", metric_self_consistency},
    };
    std::size_t failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%zu/%zu criteria passed (master seed %llu)\n", criteria.size() - failed, criteria.size(),
                static_cast<unsigned long long>(kMasterSeed));
    return failed == 0 ? 0 : 1;
}
