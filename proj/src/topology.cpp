#include "hidesim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "hidesim/digest.hpp"

namespace hidesim {

NetworkGraph::NetworkGraph(std::size_t node_count,
                           std::span<const std::pair<StationId, StationId>> edges) {
    if (node_count < 2) throw TopologyError("a network needs at least 2 stations");
    for (auto [a, b] : edges) {
        if (a == b) throw TopologyError("self-loop at station " + std::to_string(a));
        if (a >= node_count || b >= node_count)
            throw TopologyError("edge {" + std::to_string(a) + "," + std::to_string(b) +
                                "} has an endpoint >= node count " + std::to_string(node_count));
        edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    adjacency_.resize(node_count);
    bits_ = kernels::BitMatrix(node_count, node_count);
    for (const auto& e : edges_) {
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
        bits_.set(e.u, e.v);
        bits_.set(e.v, e.u);
    }
    for (auto& list : adjacency_) std::sort(list.begin(), list.end());

    auto dist = bfs_distances(0);
    for (std::size_t v = 0; v < node_count; ++v) {
        if (dist[v] == std::numeric_limits<std::size_t>::max())
            throw TopologyError("graph is disconnected: station " + std::to_string(v) +
                                " is unreachable from station 0");
    }
}

NetworkGraph NetworkGraph::complete(std::size_t n) {
    std::vector<std::pair<StationId, StationId>> e;
    for (StationId u = 0; u < n; ++u)
        for (StationId v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::path(std::size_t n) {
    std::vector<std::pair<StationId, StationId>> e;
    for (StationId u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
    return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::ring(std::size_t n) {
    if (n < 3) return path(n);
    std::vector<std::pair<StationId, StationId>> e;
    for (StationId u = 0; u < n; ++u) e.emplace_back(u, static_cast<StationId>((u + 1) % n));
    return NetworkGraph(n, e);
}

NetworkGraph NetworkGraph::random_connected(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<StationId, StationId>> e;
    std::vector<StationId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    // Attach each station to a uniformly chosen earlier one: a random spanning tree.
    for (std::size_t i = 1; i < n; ++i) e.emplace_back(order[i], order[rng() % i]);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (StationId u = 0; u < n; ++u)
        for (StationId v = u + 1; v < n; ++v)
            if (coin(rng) < p) e.emplace_back(u, v);
    return NetworkGraph(n, e);
}

std::span<const StationId> NetworkGraph::neighbors(StationId v) const {
    if (!contains(v)) throw TopologyError("invalid station id " + std::to_string(v));
    return adjacency_[v];
}

std::vector<StationId> NetworkGraph::closed_neighbors(StationId v) const {
    auto n = neighbors(v);
    std::vector<StationId> out(n.begin(), n.end());
    out.insert(std::lower_bound(out.begin(), out.end(), v), v);
    return out;
}

bool NetworkGraph::adjacent(StationId u, StationId v) const {
    if (!contains(u) || !contains(v)) return false;
    return bits_.test(u, v);
}

std::vector<std::size_t> NetworkGraph::bfs_distances(StationId source) const {
    std::vector<std::size_t> dist(node_count(), std::numeric_limits<std::size_t>::max());
    std::deque<StationId> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        StationId u = queue.front();
        queue.pop_front();
        for (StationId w : adjacency_[u]) {
            if (dist[w] == std::numeric_limits<std::size_t>::max()) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::size_t NetworkGraph::eccentricity(StationId v) const {
    if (!contains(v)) throw TopologyError("invalid station id " + std::to_string(v));
    auto dist = bfs_distances(v);
    return *std::max_element(dist.begin(), dist.end());
}

std::size_t NetworkGraph::diameter() const {
    std::size_t d = 0;
    for (StationId v = 0; v < node_count(); ++v) d = std::max(d, eccentricity(v));
    return d;
}

std::string NetworkGraph::fingerprint() const {
    return short_hash(render_topology(*this));
}

namespace {

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits on whitespace and parses each token as an unsigned integer.
std::vector<std::uint64_t> parse_numbers(std::string_view line, std::size_t line_no) {
    std::vector<std::uint64_t> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        std::uint64_t value = 0;
        auto token = line.substr(i, j - i);
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw TopologyError("expected a non-negative integer, got '" + std::string(token) + "'",
                                line_no);
        out.push_back(value);
        i = j;
    }
    return out;
}

}  // namespace

NetworkGraph parse_topology(std::string_view text) {
    std::optional<std::size_t> n;
    std::vector<std::pair<StationId, StationId>> edges;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto nums = parse_numbers(line, line_no);
        if (!n) {
            if (nums.size() != 1) throw TopologyError("first line must hold the station count", line_no);
            n = nums[0];
            continue;
        }
        if (nums.size() != 2) throw TopologyError("edge line must hold exactly two station ids", line_no);
        if (nums[0] == nums[1]) throw TopologyError("self-loop at station " + std::to_string(nums[0]), line_no);
        if (nums[0] >= *n || nums[1] >= *n)
            throw TopologyError("station id out of range [0, " + std::to_string(*n) + ")", line_no);
        edges.emplace_back(static_cast<StationId>(nums[0]), static_cast<StationId>(nums[1]));
    }
    if (!n) throw TopologyError("empty topology: missing station count");
    return NetworkGraph(*n, edges);
}

std::string render_topology(const NetworkGraph& g) {
    std::ostringstream out;
    out << g.node_count() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    return out.str();
}

}  // namespace hidesim
