#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crowdcheck {

// Dense zero-based user index.
using UserId = std::uint32_t;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Undirected simple graph in compressed adjacency form. Neighbor lists are
// sorted ascending, symmetric, and free of self-loops and duplicates.
class SocialGraph {
public:
    SocialGraph() = default;

    // Builds from an arbitrary edge list: symmetrizes, drops self-loops and
    // collapses duplicates. Throws GraphError on endpoints >= node_count.
    static SocialGraph from_edges(std::size_t node_count,
                                  std::span<const std::pair<UserId, UserId>> edges);

    std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return adjacency_.size() / 2; }

    std::span<const UserId> neighbors(UserId u) const;
    std::size_t degree(UserId u) const { return neighbors(u).size(); }

    bool has_edge(UserId u, UserId v) const;

    // Canonical "u v" lines with u < v, ascending.
    std::string to_edge_list() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<UserId> adjacency_;
};

struct LoadReport {
    std::size_t lines_read = 0;
    std::size_t comment_lines = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges_collapsed = 0;
};

struct LoadedGraph {
    SocialGraph graph;
    LoadReport report;
    // external_ids[u] is the id used for dense user u in the source file.
    std::vector<long long> external_ids;
};

// Reads a SNAP-style edge list: whitespace separated integer pairs, '#'
// comment lines, blank lines ignored. External ids are remapped to dense ids
// in ascending order.
LoadedGraph load_edge_list(std::istream& in);
LoadedGraph load_edge_list_file(const std::string& path);

enum class SyntheticKind { star, path, complete, erdos_renyi };

SyntheticKind parse_synthetic_kind(const std::string& name);

// Test fixtures. Deterministic in (kind, n, edge_prob, seed); node 0 is the
// star center.
SocialGraph synthetic_graph(SyntheticKind kind, std::size_t n, double edge_prob = 0.0,
                            std::uint64_t seed = 0);

}  // namespace crowdcheck
