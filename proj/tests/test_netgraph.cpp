// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "wsngain/error.hpp"
#include "wsngain/netgraph.hpp"

using namespace wsngain;

namespace {

std::vector<int> nbrs(const Topology& t, int i)
{
    auto s = t.neighbors(i);
    return {s.begin(), s.end()};
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no exception");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("two-node path")
{
    auto t = build_topology(2, {{0, 1}});
    CHECK(nbrs(t, 0) == std::vector<int>{1});
    CHECK(nbrs(t, 1) == std::vector<int>{0});
    CHECK(t.num_edges() == 1);
}

TEST_CASE("toy tree neighbor sets")
{
    auto t = build_topology(6, {{0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}});
    CHECK(nbrs(t, 2) == std::vector<int>{0, 1, 3});
    CHECK(nbrs(t, 3) == std::vector<int>{2, 4, 5});
    CHECK(t.neighbor_slot(3, 5) == 2);
    CHECK(t.neighbor_slot(3, 0) == -1);
    CHECK(t.adjacent(4, 3));
    CHECK_FALSE(t.adjacent(4, 5));
}

TEST_CASE("invalid inputs")
{
    CHECK(code_of([] { build_topology(3, {{0, 1}}); }) == ErrorCode::DisconnectedGraph);
    CHECK(code_of([] { build_topology(3, {{0, 0}, {1, 2}}); }) == ErrorCode::InvalidEdge);
    CHECK(code_of([] { build_topology(3, {{0, 3}}); }) == ErrorCode::InvalidEdge);
    CHECK(code_of([] { build_topology(1, {}); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { random_connected_topology(5, 0.0, 1); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([] { random_connected_topology(40, 0.01, 1, 20); }) ==
          ErrorCode::GenerationFailed);
}

TEST_CASE("duplicate edges merge")
{
    auto t = build_topology(3, {{0, 1}, {1, 0}, {1, 2}, {0, 1}});
    CHECK(t.num_edges() == 2);
    CHECK(t.degree(1) == 2);
}

TEST_CASE("random graphs")
{
    auto k2 = random_connected_topology(2, 1.0, 99);
    CHECK(k2.num_edges() == 1);
    auto k5 = random_connected_topology(5, 1.0, 3);
    for (int i = 0; i < 5; ++i)
        CHECK(k5.degree(i) == 4);
    CHECK(random_connected_topology(16, 0.3, 7) == random_connected_topology(16, 0.3, 7));
}

TEST_CASE("symmetry, handshake and connectivity")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto t = random_connected_topology(12, 0.3, seed);
        int degree_sum = 0;
        std::vector<std::vector<int>> adj(12);
        for (int i = 0; i < 12; ++i) {
            degree_sum += t.degree(i);
            for (int j : t.neighbors(i)) {
                CHECK(t.adjacent(j, i));
                CHECK(j != i);
                adj[i].push_back(j);
            }
            auto s = nbrs(t, i);
            CHECK(std::is_sorted(s.begin(), s.end()));
        }
        CHECK(degree_sum == 2 * static_cast<int>(t.num_edges()));
        CHECK(is_connected(12, adj));
    }
    CHECK_FALSE(is_connected(3, {{1}, {0}, {}}));
}
