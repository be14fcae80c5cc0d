#pragma once

// Experiment harness: one graph per topology, `pairs` random endpoint pairs,
// an exact Pareto set per pair, `runs_per_pair` learning runs per pair, and
// per-episode metrics aggregated over all instances.

#include "graph.hpp"
#include "mda.hpp"
#include "metrics.hpp"
#include "qrmo.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace mosp {

struct ExperimentConfig {
    TopologySpec topology = TopologySpec::parse("25N50E");
    CostDistribution costs = reference_cost_distribution();
    QrmoConfig qrmo;
    std::size_t pairs = 5;
    std::size_t runs_per_pair = 5;
    std::vector<std::size_t> checkpoints{10, 20, 50, 100};
    std::uint64_t seed = 1;

    std::size_t instance_count() const noexcept { return pairs * runs_per_pair; }

    void validate() const {
        topology.validate();
        costs.validate();
        qrmo.validate();
        if (qrmo.episodes == 0) throw std::invalid_argument("episodes must be positive");
        if (pairs == 0 || runs_per_pair == 0) throw std::invalid_argument("pairs and runs_per_pair must be positive");
        const std::size_t n = topology.nodes;
        if (pairs > n * (n - 1)) throw std::invalid_argument("more endpoint pairs requested than the graph has");
        for (std::size_t c : checkpoints)
            if (c < 1 || c > qrmo.episodes)
                throw std::invalid_argument("checkpoint " + std::to_string(c) + " outside [1, episodes]");
    }
};

// ---------------------------------------------------------------------------
// Config files: flat `key = value` lines, '#' comments.

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::size_t line, const std::string& what)
        : std::invalid_argument(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view s, std::string_view seps) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && seps.find(s[i]) != std::string_view::npos) ++i;
        std::size_t j = i;
        while (j < s.size() && seps.find(s[j]) == std::string_view::npos) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Decimal number, or a fraction "a/b".
inline double parse_number(std::string_view s) {
    auto one = [&](std::string_view t) {
        double v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
            throw std::invalid_argument("bad number '" + std::string(s) + "'");
        return v;
    };
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        const double den = one(s.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
        return one(s.substr(0, slash)) / den;
    }
    return one(s);
}

inline std::uint64_t parse_unsigned(std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad integer '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// Collected key/value settings. Every config in a batch shares them; the
/// `topology` key lists one or more topologies.
class ConfigBuilder {
public:
    /// Applies one `key = value` setting; throws std::invalid_argument on
    /// unknown keys or bad values.
    void set(std::string_view key, std::string_view value) {
        key = detail::trim(key);
        value = detail::trim(value);
        const std::string k(key);
        if (k == "topology") {
            topologies_ = detail::split(value, " \t");
            if (topologies_.empty()) throw std::invalid_argument("topology needs at least one entry");
            for (const auto& t : topologies_) TopologySpec::parse(t);
        } else if (k == "seed") {
            base_.seed = detail::parse_unsigned(value);
        } else if (k == "episodes") {
            base_.qrmo.episodes = detail::parse_unsigned(value);
        } else if (k == "alpha") {
            base_.qrmo.alpha = detail::parse_number(value);
        } else if (k == "epsilon") {
            base_.qrmo.epsilon = detail::parse_number(value);
        } else if (k == "max_steps") {
            base_.qrmo.max_steps = detail::parse_unsigned(value);
        } else if (k == "pairs") {
            base_.pairs = detail::parse_unsigned(value);
        } else if (k == "runs_per_pair") {
            base_.runs_per_pair = detail::parse_unsigned(value);
        } else if (k == "checkpoints") {
            base_.checkpoints.clear();
            for (const auto& c : detail::split(value, ", \t")) base_.checkpoints.push_back(detail::parse_unsigned(c));
        } else if (k == "cost.loss" || k == "cost.latency" || k == "cost.jitter") {
            const auto parts = detail::split(value, " \t");
            if (parts.size() != 6)
                throw std::invalid_argument(k + " expects 6 numbers: w1 low1 high1 w2 low2 high2");
            double v[6];
            for (int i = 0; i < 6; ++i) v[i] = detail::parse_number(parts[i]);
            const std::size_t j = k == "cost.loss" ? kLoss : k == "cost.latency" ? kLatency : kJitter;
            base_.costs.attributes[j] = {v[0], v[1], v[2], v[3], v[4], v[5]};
        } else {
            throw std::invalid_argument("unknown key '" + k + "'");
        }
    }

    /// "key=value" form used by command-line overrides.
    void set(std::string_view assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got '" + std::string(assignment) + "'");
        set(assignment.substr(0, eq), assignment.substr(eq + 1));
    }

    void read(std::istream& in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view view = line;
            if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
            view = detail::trim(view);
            if (view.empty()) continue;
            const auto eq = view.find('=');
            if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
            try {
                set(view.substr(0, eq), view.substr(eq + 1));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(line_no, e.what());
            }
        }
    }

    std::vector<ExperimentConfig> build() const {
        std::vector<ExperimentConfig> out;
        const std::vector<std::string> topologies = topologies_.empty() ? std::vector<std::string>{"25N50E"} : topologies_;
        for (const auto& t : topologies) {
            ExperimentConfig c = base_;
            c.topology = TopologySpec::parse(t);
            c.validate();
            out.push_back(std::move(c));
        }
        return out;
    }

private:
    ExperimentConfig base_;
    std::vector<std::string> topologies_;
};

inline std::vector<ExperimentConfig> parse_config(std::istream& in) {
    ConfigBuilder b;
    b.read(in);
    return b.build();
}

// ---------------------------------------------------------------------------
// Running

struct EpisodeAggregate {
    std::size_t episode = 0;
    AggregateStat dps;
    AggregateStat correctness;
    AggregateStat num_correct;
};

struct InstanceResult {
    std::size_t instance = 0;
    std::size_t pair = 0;
    std::size_t run = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::size_t pareto_size = 0;
    /// One sample per episode, episode 1 first.
    std::vector<MetricSample> series;
    double qrmo_ms = 0.0;
    double mda_ms = 0.0;
    bool completed = false;
    std::string diagnostic;
};

struct ExperimentResult {
    std::string topology;
    std::size_t episodes = 0;
    std::vector<std::size_t> checkpoints;
    std::vector<InstanceResult> instances;
    /// Aggregates for episodes 1..N, over completed instances.
    std::vector<EpisodeAggregate> per_episode;
    /// Some instance failed; aggregates cover fewer than pairs*runs samples.
    bool incomplete = false;

    const EpisodeAggregate& at_episode(std::size_t episode) const { return per_episode.at(episode - 1); }
};

/// Runs fn(0..count-1) on up to `threads` workers. Exceptions escaping fn
/// are rethrown after all workers stop.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (error) std::rethrow_exception(error);
}

/// The graph an experiment runs on: topology and costs from the master seed.
inline Graph experiment_graph(const ExperimentConfig& config) {
    TopologySpec spec = config.topology;
    spec.seed = derive_seed(config.seed, Stream::kTopology);
    return sample_costs(generate_topology(spec), config.costs, derive_seed(config.seed, Stream::kCosts));
}

/// `count` distinct ordered (src, dst) pairs with src != dst.
inline std::vector<std::pair<NodeId, NodeId>> draw_endpoint_pairs(std::size_t node_count, std::size_t count,
                                                                  std::uint64_t seed) {
    if (node_count < 2 || count > node_count * (node_count - 1))
        throw std::invalid_argument("not enough distinct endpoint pairs");
    Rng rng(seed);
    std::vector<std::pair<NodeId, NodeId>> out;
    std::set<std::pair<NodeId, NodeId>> seen;
    while (out.size() < count) {
        const auto s = static_cast<NodeId>(rng.below(node_count));
        const auto d = static_cast<NodeId>(rng.below(node_count));
        if (s == d || !seen.insert({s, d}).second) continue;
        out.emplace_back(s, d);
    }
    return out;
}

inline std::vector<EpisodeAggregate> aggregate_series(const std::vector<InstanceResult>& instances,
                                                      std::size_t episodes) {
    std::vector<EpisodeAggregate> out;
    out.reserve(episodes);
    auto stat = [](const std::vector<double>& xs) {
        if (xs.empty()) return AggregateStat{std::numeric_limits<double>::quiet_NaN(), 0.0, 0};
        return aggregate(xs);
    };
    for (std::size_t e = 1; e <= episodes; ++e) {
        std::vector<double> d, c, n;
        for (const auto& inst : instances) {
            if (!inst.completed) continue;
            const MetricSample& m = inst.series.at(e - 1);
            if (!std::isnan(m.dps)) d.push_back(m.dps);
            c.push_back(m.correctness);
            n.push_back(static_cast<double>(m.num_correct));
        }
        out.push_back({e, stat(d), stat(c), stat(n)});
    }
    return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads = 1) {
    using Clock = std::chrono::steady_clock;
    config.validate();
    const Graph graph = experiment_graph(config);
    const auto pairs = draw_endpoint_pairs(graph.node_count(), config.pairs, derive_seed(config.seed, Stream::kPairs));

    struct Reference {
        ParetoSet pareto;
        double ms = 0.0;
        std::string diagnostic;
    };
    std::vector<Reference> refs(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        try {
            const auto t0 = Clock::now();
            MdaStats stats;
            refs[p].pareto = mda_pareto(graph, pairs[p].first, pairs[p].second, &stats);
            refs[p].ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            refs[p].diagnostic = stats.diagnostic;
        } catch (const std::exception& e) {
            refs[p].diagnostic = e.what();
        }
    });

    ExperimentResult result;
    result.topology = config.topology.label();
    result.episodes = config.qrmo.episodes;
    result.checkpoints = config.checkpoints;
    result.instances.resize(config.instance_count());
    parallel_for(result.instances.size(), threads, [&](std::size_t i) {
        InstanceResult& inst = result.instances[i];
        inst.instance = i;
        inst.pair = i / config.runs_per_pair;
        inst.run = i % config.runs_per_pair;
        inst.src = pairs[inst.pair].first;
        inst.dst = pairs[inst.pair].second;
        const Reference& ref = refs[inst.pair];
        inst.mda_ms = ref.ms;
        inst.pareto_size = ref.pareto.size();
        if (ref.pareto.empty()) {
            inst.diagnostic = "no reference Pareto set: " + ref.diagnostic;
            return;
        }
        try {
            QrmoConfig qc = config.qrmo;
            qc.seed = derive_seed(config.seed, Stream::kExploration, i);
            const auto t0 = Clock::now();
            const auto run = qrmo_run(graph, inst.src, inst.dst, qc);
            inst.qrmo_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            inst.series = evaluate_trace<kDefaultAttributes>(ref.pareto, run.trace, i, inst.run);
            inst.completed = true;
        } catch (const std::exception& e) {
            inst.diagnostic = e.what();
        }
    });

    result.incomplete = std::any_of(result.instances.begin(), result.instances.end(),
                                    [](const InstanceResult& r) { return !r.completed; });
    result.per_episode = aggregate_series(result.instances, result.episodes);
    return result;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr std::string_view kMetricsHeader = "instance,run,episode,dps,correctness,num_correct";
inline constexpr std::string_view kAggregateHeader = "topology,episode,metric,mean,ci95_halfwidth,n";
inline constexpr std::string_view kTimingsHeader = "instance,algorithm,wall_ms";

inline void write_metrics_rows(std::ostream& out, const ExperimentResult& r) {
    for (const auto& inst : r.instances)
        for (const auto& m : inst.series)
            out << m.instance << ',' << m.run << ',' << m.episode << ',' << format_real(m.dps) << ','
                << m.correctness << ',' << m.num_correct << '\n';
}

inline void write_aggregate_rows(std::ostream& out, const ExperimentResult& r) {
    for (const auto& a : r.per_episode) {
        const std::pair<const char*, const AggregateStat*> rows[] = {
            {"dps", &a.dps}, {"correctness", &a.correctness}, {"num_correct", &a.num_correct}};
        for (auto [name, s] : rows)
            out << r.topology << ',' << a.episode << ',' << name << ',' << format_real(s->mean) << ','
                << format_real(s->ci_halfwidth) << ',' << s->n << '\n';
    }
}

inline void write_timing_rows(std::ostream& out, const ExperimentResult& r) {
    for (const auto& inst : r.instances) {
        if (!inst.completed) continue;
        out << inst.instance << ",mda," << format_real(inst.mda_ms) << '\n';
        out << inst.instance << ",qrmo," << format_real(inst.qrmo_ms) << '\n';
    }
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace detail

/// Writes metrics.csv, aggregate.csv and timings.csv into out_dir
/// (created if missing). Returns the written paths.
inline std::vector<std::filesystem::path> emit_csv(const ExperimentResult& result,
                                                   const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());
    const std::vector<std::filesystem::path> paths{out_dir / "metrics.csv", out_dir / "aggregate.csv",
                                                   out_dir / "timings.csv"};
    {
        auto out = detail::open_output(paths[0]);
        out << kMetricsHeader << '\n';
        write_metrics_rows(out, result);
    }
    {
        auto out = detail::open_output(paths[1]);
        out << kAggregateHeader << '\n';
        write_aggregate_rows(out, result);
    }
    {
        auto out = detail::open_output(paths[2]);
        out << kTimingsHeader << '\n';
        write_timing_rows(out, result);
    }
    return paths;
}

/// Batch layout: one subdirectory per topology plus a combined aggregate.csv.
inline void emit_batch_csv(std::span<const ExperimentResult> results, const std::filesystem::path& out_dir) {
    for (const auto& r : results) emit_csv(r, out_dir / r.topology);
    auto out = detail::open_output(out_dir / "aggregate.csv");
    out << kAggregateHeader << '\n';
    for (const auto& r : results) write_aggregate_rows(out, r);
}

// ---------------------------------------------------------------------------
// CSV input (for plotting and re-checking emitted files)

struct AggregateRow {
    std::string topology;
    std::size_t episode = 0;
    std::string metric;
    double mean = 0.0;
    double ci95_halfwidth = 0.0;
    std::size_t n = 0;
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

namespace detail {

inline double parse_csv_real(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

inline std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kAggregateHeader) throw std::runtime_error("not an aggregate CSV");
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw std::runtime_error("aggregate CSV row has " + std::to_string(f.size()) + " fields");
        rows.push_back({f[0], detail::parse_unsigned(f[1]), f[2], detail::parse_csv_real(f[3]),
                        detail::parse_csv_real(f[4]), detail::parse_unsigned(f[5])});
    }
    return rows;
}

inline std::vector<MetricSample> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) throw std::runtime_error("not a metrics CSV");
    std::vector<MetricSample> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw std::runtime_error("metrics CSV row has " + std::to_string(f.size()) + " fields");
        MetricSample m;
        m.instance = detail::parse_unsigned(f[0]);
        m.run = detail::parse_unsigned(f[1]);
        m.episode = detail::parse_unsigned(f[2]);
        m.dps = detail::parse_csv_real(f[3]);
        m.correctness = static_cast<int>(detail::parse_unsigned(f[4]));
        m.num_correct = detail::parse_unsigned(f[5]);
        rows.push_back(m);
    }
    return rows;
}

}  // namespace mosp
