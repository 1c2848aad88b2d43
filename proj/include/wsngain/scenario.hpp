// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wsngain/model.hpp"
#include "wsngain/netgraph.hpp"

namespace wsngain {

/// Ranges used when drawing channels and noise statistics.
struct NoiseConfig {
    double alpha = 1.0;      // path-loss exponent
    double d_min = 1.0;      // sensor distance ~ U[d_min, d_max]
    double d_max = 10.0;
    double v_min = 0.5;      // sensor noise variance ~ U[v_min, v_max]
    double v_max = 1.5;
    double noise_var = 1.0;  // FC / link noise variance

    /// Throws InvalidConfig on nonpositive or inverted ranges.
    void validate() const;

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct CentralizedScenario {
    int num_sensors = 0;
    int num_antennas = 0;
    CMatrix channel;  // num_antennas x num_sensors, column i is sensor i
    RVector sensor_noise_var;
    double fc_noise_var = 1.0;
    cdouble theta{1.0, 0.0};
    std::uint64_t seed = 0;
    NoiseConfig config;

    EstimationModel model() const;
    /// Throws InvalidConfig when noise variances are nonpositive or some
    /// sensor has an all-zero channel column.
    void validate() const;
};

struct DecentralizedScenario {
    Topology topology;
    /// link_gain[rx][slot] = h_{rx, tx} with tx = topology.neighbors(rx)[slot].
    std::vector<std::vector<cdouble>> link_gain;
    RVector sensor_noise_var;
    double comm_noise_var = 1.0;
    cdouble theta{1.0, 0.0};
    std::uint64_t seed = 0;
    NoiseConfig config;

    int num_nodes() const { return topology.num_nodes(); }
    /// Gain of the link from `tx` into `rx`; throws InconsistentPlan if the
    /// two nodes are not adjacent.
    cdouble gain(int rx, int tx) const;
    void validate() const;
};

bool operator==(const CentralizedScenario& a, const CentralizedScenario& b);
bool operator==(const DecentralizedScenario& a, const DecentralizedScenario& b);

/// e^{j gamma} / d^alpha with gamma ~ U[0, 2 pi).
cdouble gen_channel_coefficient(std::mt19937_64& rng, double distance, double path_loss_exp);

/// Fusion center with `num_antennas` antennas. Each sensor draws one distance
/// and an independent phase per antenna.
CentralizedScenario gen_centralized_scenario(int num_sensors, int num_antennas,
                                             const NoiseConfig& config, cdouble theta,
                                             std::uint64_t seed);

/// One independent coefficient per directed link of the topology.
DecentralizedScenario gen_decentralized_scenario(const Topology& topology,
                                                 const NoiseConfig& config, cdouble theta,
                                                 std::uint64_t seed);

}  // namespace wsngain
