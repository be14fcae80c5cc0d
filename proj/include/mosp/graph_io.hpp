#pragma once

// Line-oriented graph files:
//
//   mosp-graph v1
//   nodes <count>
//   <u> <v> <loss_additive> <latency_ms> <jitter_ms>
//   ...
//
// '#' starts a comment that runs to the end of the line. Blank lines are
// ignored. The loader rejects anything that violates a graph invariant.

#include "graph.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mosp {

class GraphFormatError : public std::runtime_error {
public:
    GraphFormatError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    /// 1-based line of the offending input, 0 for whole-file problems.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::string_view kGraphHeader = "mosp-graph v1";

/// Shortest decimal form that parses back to the same double.
inline std::string format_real(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, end);
}

template <std::size_t J>
void write_graph(std::ostream& out, const BasicGraph<J>& graph) {
    out << kGraphHeader << '\n' << "nodes " << graph.node_count() << '\n';
    for (const auto& e : graph.edges()) {
        out << e.u << ' ' << e.v;
        for (double c : e.cost) out << ' ' << format_real(c);
        out << '\n';
    }
}

template <std::size_t J = kDefaultAttributes>
BasicGraph<J> read_graph(std::istream& in) {
    auto tokenize = [](std::string_view line) {
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::vector<std::string_view> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
            if (j > i) tokens.push_back(line.substr(i, j - i));
            i = j;
        }
        return tokens;
    };
    auto parse_uint = [](std::string_view s, std::size_t line_no, const char* what) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw GraphFormatError(line_no, std::string("bad ") + what + " '" + std::string(s) + "'");
        return v;
    };
    auto parse_real = [](std::string_view s, std::size_t line_no) {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
            throw GraphFormatError(line_no, "bad cost value '" + std::string(s) + "'");
        if (v < 0.0) throw GraphFormatError(line_no, "negative cost '" + std::string(s) + "'");
        return v;
    };

    std::string line;
    std::size_t line_no = 0;
    enum { kHeader, kNodes, kEdges } state = kHeader;
    std::size_t node_count = 0;
    std::vector<BasicEdge<J>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        switch (state) {
        case kHeader:
            if (tokens.size() != 2 || tokens[0] != "mosp-graph" || tokens[1] != "v1")
                throw GraphFormatError(line_no, "expected header 'mosp-graph v1'");
            state = kNodes;
            break;
        case kNodes:
            if (tokens.size() != 2 || tokens[0] != "nodes")
                throw GraphFormatError(line_no, "expected 'nodes <count>'");
            node_count = parse_uint(tokens[1], line_no, "node count");
            if (node_count == 0) throw GraphFormatError(line_no, "node count must be positive");
            if (node_count > std::numeric_limits<NodeId>::max())
                throw GraphFormatError(line_no, "node count too large");
            state = kEdges;
            break;
        case kEdges: {
            if (tokens.size() != 2 + J)
                throw GraphFormatError(line_no, "expected " + std::to_string(2 + J) + " fields, got " +
                                                    std::to_string(tokens.size()));
            BasicEdge<J> e;
            const auto u = parse_uint(tokens[0], line_no, "node id");
            const auto v = parse_uint(tokens[1], line_no, "node id");
            if (u >= node_count || v >= node_count)
                throw GraphFormatError(line_no, "node id out of range");
            if (u == v) throw GraphFormatError(line_no, "self-loop");
            e.u = static_cast<NodeId>(u);
            e.v = static_cast<NodeId>(v);
            for (std::size_t j = 0; j < J; ++j) e.cost[j] = parse_real(tokens[2 + j], line_no);
            edges.push_back(e);
            break;
        }
        }
    }
    if (state != kEdges) throw GraphFormatError(0, "truncated file: missing header or node count");
    BasicGraph<J> graph(node_count, std::move(edges));
    if (!graph.is_connected()) throw GraphFormatError(0, "graph is not connected");
    return graph;
}

template <std::size_t J>
void save_graph(const BasicGraph<J>& graph, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_graph(out, graph);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

template <std::size_t J = kDefaultAttributes>
BasicGraph<J> load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_graph<J>(in);
}

}  // namespace mosp
