// SPDX-License-Identifier: Apache-2.0
#include "wsngain/netgraph.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <string>

#include "wsngain/error.hpp"

namespace wsngain {

bool Topology::adjacent(int i, int j) const
{
    return neighbor_slot(i, j) >= 0;
}

int Topology::neighbor_slot(int node, int neighbor) const
{
    const auto& nb = neighbors_.at(node);
    auto it = std::lower_bound(nb.begin(), nb.end(), neighbor);
    if (it == nb.end() || *it != neighbor)
        return -1;
    return static_cast<int>(it - nb.begin());
}

bool is_connected(int num_nodes, const std::vector<std::vector<int>>& adjacency)
{
    if (num_nodes <= 0)
        return false;
    std::vector<char> seen(num_nodes, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        for (int v : adjacency[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == num_nodes;
}

Topology build_topology(int num_nodes, const std::vector<Edge>& edges)
{
    if (num_nodes < 2)
        throw Error(ErrorCode::InvalidConfig, "topology needs at least 2 nodes");

    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes)
            throw Error(ErrorCode::InvalidEdge, "edge endpoint out of range: (" + std::to_string(i) +
                                                    ", " + std::to_string(j) + ")");
        if (i == j)
            throw Error(ErrorCode::InvalidEdge, "self-loop at node " + std::to_string(i));
        canon.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    std::vector<std::vector<int>> adjacency(num_nodes);
    for (auto [i, j] : canon) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
    }
    for (auto& nb : adjacency)
        std::sort(nb.begin(), nb.end());

    if (!is_connected(num_nodes, adjacency))
        throw Error(ErrorCode::DisconnectedGraph, "graph is not connected");

    Topology t;
    t.edges_ = std::move(canon);
    t.neighbors_ = std::move(adjacency);
    return t;
}

Topology random_connected_topology(int num_nodes, double edge_probability, std::uint64_t seed,
                                   int max_attempts)
{
    if (!(edge_probability > 0.0 && edge_probability <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "edge probability must lie in (0, 1]");
    if (num_nodes < 2)
        throw Error(ErrorCode::InvalidConfig, "topology needs at least 2 nodes");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<Edge> edges;
        for (int i = 0; i < num_nodes; ++i)
            for (int j = i + 1; j < num_nodes; ++j)
                if (coin(rng) < edge_probability)
                    edges.emplace_back(i, j);
        try {
            return build_topology(num_nodes, edges);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DisconnectedGraph)
                throw;
        }
    }
    throw Error(ErrorCode::GenerationFailed,
                "no connected graph after " + std::to_string(max_attempts) +
                    " draws; edge probability too low for N=" + std::to_string(num_nodes));
}

}  // namespace wsngain
