// SPDX-License-Identifier: Apache-2.0
#include "wsngain/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wsngain/error.hpp"

namespace wsngain {

void NoiseConfig::validate() const
{
    if (!(d_min > 0.0) || !(d_max >= d_min))
        throw Error(ErrorCode::InvalidConfig, "distance range must satisfy 0 < d_min <= d_max");
    if (!(v_min > 0.0) || !(v_max >= v_min))
        throw Error(ErrorCode::InvalidConfig,
                    "sensor noise range must satisfy 0 < v_min <= v_max");
    if (!(noise_var > 0.0))
        throw Error(ErrorCode::InvalidConfig, "communication noise variance must be positive");
    if (!std::isfinite(alpha))
        throw Error(ErrorCode::InvalidConfig, "path-loss exponent must be finite");
}

EstimationModel CentralizedScenario::model() const
{
    return EstimationModel{channel, sensor_noise_var, fc_noise_var};
}

void CentralizedScenario::validate() const
{
    if (num_sensors < 1 || num_antennas < 1)
        throw Error(ErrorCode::InvalidConfig, "scenario needs N >= 1 and M >= 1");
    if (channel.rows() != num_antennas || channel.cols() != num_sensors ||
        sensor_noise_var.size() != num_sensors)
        throw Error(ErrorCode::InvalidConfig, "scenario dimensions are inconsistent");
    if (!(fc_noise_var > 0.0) || !(sensor_noise_var.array() > 0.0).all())
        throw Error(ErrorCode::InvalidConfig, "noise variances must be strictly positive");
    for (int i = 0; i < num_sensors; ++i)
        if (channel.col(i).squaredNorm() == 0.0)
            throw Error(ErrorCode::InvalidConfig,
                        "sensor " + std::to_string(i) + " has an all-zero channel");
}

cdouble DecentralizedScenario::gain(int rx, int tx) const
{
    int slot = topology.neighbor_slot(rx, tx);
    if (slot < 0)
        throw Error(ErrorCode::InconsistentPlan, "nodes " + std::to_string(rx) + " and " +
                                                     std::to_string(tx) + " are not adjacent");
    return link_gain[rx][slot];
}

void DecentralizedScenario::validate() const
{
    int n = topology.num_nodes();
    if (static_cast<int>(link_gain.size()) != n || sensor_noise_var.size() != n)
        throw Error(ErrorCode::InvalidConfig, "scenario dimensions are inconsistent");
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(link_gain[i].size()) != topology.degree(i))
            throw Error(ErrorCode::InvalidConfig,
                        "node " + std::to_string(i) + " is missing link gains");
    if (!(comm_noise_var > 0.0) || !(sensor_noise_var.array() > 0.0).all())
        throw Error(ErrorCode::InvalidConfig, "noise variances must be strictly positive");
}

bool operator==(const CentralizedScenario& a, const CentralizedScenario& b)
{
    if (a.channel.rows() != b.channel.rows() || a.channel.cols() != b.channel.cols() ||
        a.sensor_noise_var.size() != b.sensor_noise_var.size())
        return false;
    return a.num_sensors == b.num_sensors && a.num_antennas == b.num_antennas &&
           a.channel == b.channel && a.sensor_noise_var == b.sensor_noise_var &&
           a.fc_noise_var == b.fc_noise_var && a.theta == b.theta && a.seed == b.seed &&
           a.config == b.config;
}

bool operator==(const DecentralizedScenario& a, const DecentralizedScenario& b)
{
    return a.topology == b.topology && a.link_gain == b.link_gain &&
           a.sensor_noise_var.size() == b.sensor_noise_var.size() &&
           a.sensor_noise_var == b.sensor_noise_var && a.comm_noise_var == b.comm_noise_var &&
           a.theta == b.theta && a.seed == b.seed && a.config == b.config;
}

cdouble gen_channel_coefficient(std::mt19937_64& rng, double distance, double path_loss_exp)
{
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    return std::polar(1.0 / std::pow(distance, path_loss_exp), phase(rng));
}

CentralizedScenario gen_centralized_scenario(int num_sensors, int num_antennas,
                                             const NoiseConfig& config, cdouble theta,
                                             std::uint64_t seed)
{
    if (num_sensors < 1 || num_antennas < 1)
        throw Error(ErrorCode::InvalidConfig, "scenario needs N >= 1 and M >= 1");
    config.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(config.d_min, config.d_max);
    std::uniform_real_distribution<double> var(config.v_min, config.v_max);

    CentralizedScenario s;
    s.num_sensors = num_sensors;
    s.num_antennas = num_antennas;
    s.channel.resize(num_antennas, num_sensors);
    s.sensor_noise_var.resize(num_sensors);
    for (int i = 0; i < num_sensors; ++i) {
        double d = dist(rng);
        for (int m = 0; m < num_antennas; ++m)
            s.channel(m, i) = gen_channel_coefficient(rng, d, config.alpha);
        s.sensor_noise_var(i) = var(rng);
    }
    s.fc_noise_var = config.noise_var;
    s.theta = theta;
    s.seed = seed;
    s.config = config;
    return s;
}

DecentralizedScenario gen_decentralized_scenario(const Topology& topology,
                                                 const NoiseConfig& config, cdouble theta,
                                                 std::uint64_t seed)
{
    config.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(config.d_min, config.d_max);
    std::uniform_real_distribution<double> var(config.v_min, config.v_max);

    const int n = topology.num_nodes();
    DecentralizedScenario s;
    s.topology = topology;
    s.link_gain.resize(n);
    for (int rx = 0; rx < n; ++rx) {
        s.link_gain[rx].reserve(topology.degree(rx));
        for ([[maybe_unused]] int tx : topology.neighbors(rx))
            s.link_gain[rx].push_back(gen_channel_coefficient(rng, dist(rng), config.alpha));
    }
    s.sensor_noise_var.resize(n);
    for (int i = 0; i < n; ++i)
        s.sensor_noise_var(i) = var(rng);
    s.comm_noise_var = config.noise_var;
    s.theta = theta;
    s.seed = seed;
    s.config = config;
    return s;
}

}  // namespace wsngain
