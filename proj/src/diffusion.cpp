// SPDX-License-Identifier: Apache-2.0
#include "wsngain/diffusion.hpp"

#include <algorithm>
#include <string>

#include "wsngain/error.hpp"

namespace wsngain {

double local_information(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                         std::span<const int> parents)
{
    double total = 0.0;
    for (int k : parents) {
        double p = std::norm(scenario.gain(sink, k) * gains(k));
        total += p / (p * scenario.sensor_noise_var(k) + scenario.comm_noise_var);
    }
    return total;
}

double information_value(int sink, const CVector& gains, const DecentralizedScenario& scenario)
{
    return local_information(sink, gains, scenario, scenario.topology.neighbors(sink));
}

RVector information_values(const CVector& gains, const DecentralizedScenario& scenario)
{
    RVector info(scenario.num_nodes());
    for (int i = 0; i < scenario.num_nodes(); ++i)
        info(i) = information_value(i, gains, scenario);
    return info;
}

CompressionPlan assign_carriers(const Topology& topology, const RVector& info)
{
    const int n = topology.num_nodes();
    if (info.size() != n)
        throw Error(ErrorCode::InvalidConfig, "information table does not match topology");

    CompressionPlan plan;
    plan.carrier.resize(n);
    plan.retained_rows.resize(n);
    for (int parent = 0; parent < n; ++parent) {
        auto nb = topology.neighbors(parent);
        // neighbors are ascending, so strict > keeps the lowest index on ties
        int best = nb.front();
        for (int j : nb.subspan(1))
            if (info(j) > info(best))
                best = j;
        plan.carrier[parent] = best;
        plan.retained_rows[best].push_back(parent);
    }
    plan.discarded = 2 * static_cast<int>(topology.num_edges()) - n;
    plan.m_dim = n;
    return plan;
}

void check_plan(const CompressionPlan& plan, const Topology& topology)
{
    const int n = topology.num_nodes();
    if (static_cast<int>(plan.carrier.size()) != n ||
        static_cast<int>(plan.retained_rows.size()) != n)
        throw Error(ErrorCode::InconsistentPlan, "plan size does not match topology");
    int rows = 0;
    for (int sink = 0; sink < n; ++sink) {
        for (int parent : plan.retained_rows[sink]) {
            if (parent < 0 || parent >= n || !topology.adjacent(sink, parent))
                throw Error(ErrorCode::InconsistentPlan,
                            "sink " + std::to_string(sink) + " retains non-neighbor " +
                                std::to_string(parent));
            if (plan.carrier[parent] != sink)
                throw Error(ErrorCode::InconsistentPlan,
                            "retained row of parent " + std::to_string(parent) +
                                " disagrees with its carrier");
        }
        rows += static_cast<int>(plan.retained_rows[sink].size());
    }
    if (rows != n || plan.m_dim != n)
        throw Error(ErrorCode::InconsistentPlan, "every node must be retained exactly once");
}

std::pair<int, int> GlobalModel::sink_rows(int sink) const
{
    auto lo = std::lower_bound(rows.begin(), rows.end(), sink,
                               [](const RowSource& r, int s) { return r.rx < s; });
    auto hi = std::upper_bound(rows.begin(), rows.end(), sink,
                               [](int s, const RowSource& r) { return s < r.rx; });
    return {static_cast<int>(lo - rows.begin()), static_cast<int>(hi - rows.begin())};
}

GlobalModel assemble_global_model(const CompressionPlan& plan,
                                  const DecentralizedScenario& scenario)
{
    check_plan(plan, scenario.topology);
    const int n = scenario.num_nodes();

    GlobalModel g;
    g.model.channel = CMatrix::Zero(plan.m_dim, n);
    g.model.sensor_noise_var = scenario.sensor_noise_var;
    g.model.noise_var = scenario.comm_noise_var;
    g.rows.reserve(plan.m_dim);
    int row = 0;
    for (int sink = 0; sink < n; ++sink) {
        for (int parent : plan.retained_rows[sink]) {
            g.model.channel(row, parent) = scenario.gain(sink, parent);
            g.rows.push_back({parent, sink});
            ++row;
        }
    }
    return g;
}

GlobalModel compressed_model(const CVector& gains, const DecentralizedScenario& scenario,
                             CompressionPlan* plan_out)
{
    CompressionPlan plan = assign_carriers(scenario.topology, information_values(gains, scenario));
    GlobalModel g = assemble_global_model(plan, scenario);
    if (plan_out)
        *plan_out = std::move(plan);
    return g;
}

}  // namespace wsngain
