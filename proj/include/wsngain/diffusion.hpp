// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "wsngain/model.hpp"
#include "wsngain/scenario.hpp"

namespace wsngain {

/// Quadratic information form at `sink` restricted to the given transmitting
/// neighbors:
///
///     sum_k |h a_k|^2 / (|h a_k|^2 sigma_{v,k}^2 + sigma_n^2),  h = h_{sink,k}.
double local_information(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                         std::span<const int> parents);

/// Information value of `sink` over all of its strict neighbors.
double information_value(int sink, const CVector& gains, const DecentralizedScenario& scenario);

/// Information values of every node.
RVector information_values(const CVector& gains, const DecentralizedScenario& scenario);

/// Which neighbor keeps each node's transmission.
struct CompressionPlan {
    std::vector<int> carrier;                    // carrier[parent]
    std::vector<std::vector<int>> retained_rows; // retained_rows[sink], ascending
    int discarded = 0;                           // r = 2|E| - N
    int m_dim = 0;                               // retained rows, always N

    friend bool operator==(const CompressionPlan&, const CompressionPlan&) = default;
};

/// Each parent hands its transmission to the neighbor with the largest
/// information value; ties go to the lowest index.
CompressionPlan assign_carriers(const Topology& topology, const RVector& info);

/// Throws InconsistentPlan unless the plan matches the topology.
void check_plan(const CompressionPlan& plan, const Topology& topology);

/// One retained transmission (row of the global channel matrix).
struct RowSource {
    int tx = 0;
    int rx = 0;
    friend bool operator==(const RowSource&, const RowSource&) = default;
};

/// Compressed global linear model. Rows are sink-major, parents ascending.
struct GlobalModel {
    EstimationModel model;
    std::vector<RowSource> rows;

    /// Row indices [begin, end) belonging to `sink`.
    std::pair<int, int> sink_rows(int sink) const;
};

GlobalModel assemble_global_model(const CompressionPlan& plan,
                                  const DecentralizedScenario& scenario);

/// Plan and global model implied by a gain vector.
GlobalModel compressed_model(const CVector& gains, const DecentralizedScenario& scenario,
                             CompressionPlan* plan_out = nullptr);

}  // namespace wsngain
