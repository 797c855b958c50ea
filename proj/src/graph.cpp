#include "crowdcheck/graph.hpp"

#include "crowdcheck/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace crowdcheck {

ParseError::ParseError(std::size_t line, const std::string& what)
    : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

SocialGraph SocialGraph::from_edges(std::size_t node_count,
                                    std::span<const std::pair<UserId, UserId>> edges) {
    std::vector<std::pair<UserId, UserId>> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& [u, v] : edges) {
        if (u >= node_count || v >= node_count) {
            throw GraphError("edge endpoint out of range: " + std::to_string(u) + " " +
                             std::to_string(v));
        }
        if (u == v) continue;
        directed.emplace_back(u, v);
        directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    SocialGraph g;
    g.offsets_.assign(node_count + 1, 0);
    for (const auto& e : directed) ++g.offsets_[e.first + 1];
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.reserve(directed.size());
    for (const auto& e : directed) g.adjacency_.push_back(e.second);
    return g;
}

std::span<const UserId> SocialGraph::neighbors(UserId u) const {
    if (u >= node_count()) {
        throw std::out_of_range("user " + std::to_string(u) + " out of range [0, " +
                                std::to_string(node_count()) + ")");
    }
    return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

bool SocialGraph::has_edge(UserId u, UserId v) const {
    const auto adj = neighbors(u);
    return std::binary_search(adj.begin(), adj.end(), v);
}

std::string SocialGraph::to_edge_list() const {
    std::ostringstream out;
    for (UserId u = 0; u < node_count(); ++u) {
        for (UserId v : neighbors(u)) {
            if (u < v) out << u << ' ' << v << '\n';
        }
    }
    return out.str();
}

namespace {

bool parse_id(std::string_view token, long long& out) {
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in) {
    LoadedGraph result;
    std::vector<std::pair<long long, long long>> raw_edges;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            ++result.report.comment_lines;
            continue;
        }
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b)) throw ParseError(line_no, "expected two ids, got '" + line + "'");
        if (fields >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
        long long u = 0, v = 0;
        if (!parse_id(a, u)) throw ParseError(line_no, "non-integer token '" + a + "'");
        if (!parse_id(b, v)) throw ParseError(line_no, "non-integer token '" + b + "'");
        ++result.report.lines_read;
        raw_edges.emplace_back(u, v);
    }
    if (result.report.lines_read == 0) throw GraphError("edge list is empty");

    // Dense ids follow ascending external id, so a loaded graph re-serializes
    // to itself.
    auto& ids = result.external_ids;
    ids.reserve(2 * raw_edges.size());
    for (auto [u, v] : raw_edges) {
        ids.push_back(u);
        ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto dense = [&](long long ext) {
        return static_cast<UserId>(std::lower_bound(ids.begin(), ids.end(), ext) - ids.begin());
    };

    std::vector<std::pair<UserId, UserId>> edges;
    edges.reserve(raw_edges.size());
    for (auto [u, v] : raw_edges) {
        if (u == v) {
            ++result.report.self_loops_dropped;
            continue;
        }
        const UserId du = dense(u), dv = dense(v);
        edges.emplace_back(std::min(du, dv), std::max(du, dv));
    }

    const std::size_t raw = edges.size();
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    result.report.duplicate_edges_collapsed = raw - edges.size();
    result.graph = SocialGraph::from_edges(ids.size(), edges);
    return result;
}

LoadedGraph load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open graph file: " + path);
    return load_edge_list(in);
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
    if (name == "star") return SyntheticKind::star;
    if (name == "path") return SyntheticKind::path;
    if (name == "complete") return SyntheticKind::complete;
    if (name == "erdos_renyi") return SyntheticKind::erdos_renyi;
    throw GraphError("unknown synthetic graph kind: " + name);
}

SocialGraph synthetic_graph(SyntheticKind kind, std::size_t n, double edge_prob,
                            std::uint64_t seed) {
    if (n == 0) throw GraphError("synthetic graph needs at least one node");
    std::vector<std::pair<UserId, UserId>> edges;
    switch (kind) {
        case SyntheticKind::star:
            for (UserId v = 1; v < n; ++v) edges.emplace_back(0, v);
            break;
        case SyntheticKind::path:
            for (UserId v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
            break;
        case SyntheticKind::complete:
            for (UserId u = 0; u < n; ++u)
                for (UserId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
            break;
        case SyntheticKind::erdos_renyi: {
            if (edge_prob < 0.0 || edge_prob > 1.0) throw GraphError("edge_prob must be in [0,1]");
            Rng rng = substream(seed, "erdos_renyi");
            for (UserId u = 0; u < n; ++u)
                for (UserId v = u + 1; v < n; ++v)
                    if (rng.bernoulli(edge_prob)) edges.emplace_back(u, v);
            break;
        }
    }
    return SocialGraph::from_edges(n, edges);
}

}  // namespace crowdcheck
