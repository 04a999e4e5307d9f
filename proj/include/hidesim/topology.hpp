#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hidesim/kernels.hpp"

namespace hidesim {

// Dense station index in [0, n).
using StationId = std::uint32_t;

struct Edge {
    StationId u;
    StationId v;  // u < v
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class TopologyError : public std::runtime_error {
public:
    explicit TopologyError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}
    // 1-based input line of a parse error, 0 when not a parse error.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Undirected, connected, simple graph of stations. Immutable after construction.
class NetworkGraph {
public:
    // Throws TopologyError on self-loops, out-of-range endpoints, n < 2, or a
    // disconnected edge set. Duplicate edges collapse.
    NetworkGraph(std::size_t node_count, std::span<const std::pair<StationId, StationId>> edges);

    static NetworkGraph complete(std::size_t n);
    static NetworkGraph path(std::size_t n);
    static NetworkGraph ring(std::size_t n);
    // Random spanning tree plus each remaining pair independently with probability p.
    static NetworkGraph random_connected(std::size_t n, double p, std::uint64_t seed);

    std::size_t node_count() const { return adjacency_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    // N(v), sorted ascending. Throws TopologyError for an invalid id.
    std::span<const StationId> neighbors(StationId v) const;
    // N(v) ∪ {v}, sorted ascending.
    std::vector<StationId> closed_neighbors(StationId v) const;
    bool adjacent(StationId u, StationId v) const;
    bool contains(StationId v) const { return v < node_count(); }

    std::size_t eccentricity(StationId v) const;
    std::size_t diameter() const;

    // Row v has bit u set iff {u, v} ∈ E.
    const kernels::BitMatrix& adjacency_bits() const { return bits_; }

    // Stable fingerprint of the normalized edge list.
    std::string fingerprint() const;

    friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
        return a.node_count() == b.node_count() && a.edges_ == b.edges_;
    }

private:
    std::vector<std::size_t> bfs_distances(StationId source) const;

    std::vector<Edge> edges_;
    std::vector<std::vector<StationId>> adjacency_;
    kernels::BitMatrix bits_;
};

// Edge-list text: first non-comment line is n, then one "u v" pair per line.
// '#' starts a comment that runs to end of line; blank lines are ignored.
NetworkGraph parse_topology(std::string_view text);
std::string render_topology(const NetworkGraph& g);

}  // namespace hidesim
