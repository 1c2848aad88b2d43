// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wsngain {

/// Undirected edge between two 0-based node indices.
using Edge = std::pair<int, int>;

/// Connected undirected sensor network. Neighbor sequences exclude the node
/// itself and are sorted by ascending index.
class Topology {
public:
    int num_nodes() const noexcept { return static_cast<int>(neighbors_.size()); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    /// Edges as (i, j) with i < j, sorted lexicographically.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::span<const int> neighbors(int node) const { return neighbors_.at(node); }
    int degree(int node) const { return static_cast<int>(neighbors_.at(node).size()); }
    bool adjacent(int i, int j) const;

    /// Position of `neighbor` inside neighbors(node), or -1.
    int neighbor_slot(int node, int neighbor) const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    friend Topology build_topology(int, const std::vector<Edge>&);

    std::vector<Edge> edges_;
    std::vector<std::vector<int>> neighbors_;
};

/// Validates and builds a topology. Throws InvalidEdge on self-loops or
/// out-of-range endpoints and DisconnectedGraph if some node is unreachable.
/// Duplicate edges (in either orientation) are merged.
Topology build_topology(int num_nodes, const std::vector<Edge>& edges);

/// Erdős–Rényi G(n, p), redrawn until connected. Throws GenerationFailed once
/// `max_attempts` draws were all disconnected.
Topology random_connected_topology(int num_nodes, double edge_probability, std::uint64_t seed,
                                   int max_attempts = 1000);

bool is_connected(int num_nodes, const std::vector<std::vector<int>>& adjacency);

}  // namespace wsngain
