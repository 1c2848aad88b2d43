// SPDX-License-Identifier: Apache-2.0
#include "wsngain/estimator.hpp"

#include <cmath>
#include <limits>

namespace wsngain {

namespace {

constexpr double kMinInformation = 1e-300;
constexpr double kMinNodeInformation = 1e-12;

cdouble circular_normal(std::mt19937_64& rng, double variance)
{
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    double re = g(rng);
    double im = g(rng);
    return {re, im};
}

// C^{-1} H a via Cholesky of the combined noise covariance.
CVector whitened_signal(const EstimationModel& model, const CVector& gains, CVector& signal)
{
    signal = model.channel * gains;
    Eigen::LLT<CMatrix> llt(noise_covariance(model, gains));
    return llt.solve(signal);
}

}  // namespace

CMatrix noise_covariance(const EstimationModel& model, const CVector& gains)
{
    RVector scale = gains.array().abs2() * model.sensor_noise_var.array();
    CMatrix c = model.channel * scale.asDiagonal() * model.channel.adjoint();
    c.diagonal().array() += model.noise_var;
    return c;
}

double information(const EstimationModel& model, const CVector& gains)
{
    CVector signal;
    CVector w = whitened_signal(model, gains, signal);
    return signal.dot(w).real();
}

double global_variance(const EstimationModel& model, const CVector& gains)
{
    double info = information(model, gains);
    if (!(info >= kMinInformation))
        throw Error(ErrorCode::DegenerateGains, "effective gains carry no information");
    return 1.0 / info;
}

CVector mle_weights(const EstimationModel& model, const CVector& gains)
{
    CVector signal;
    CVector w = whitened_signal(model, gains, signal);
    double info = signal.dot(w).real();
    if (!(info >= kMinInformation))
        throw Error(ErrorCode::DegenerateGains, "effective gains carry no information");
    return w / info;
}

cdouble global_mle(const EstimationModel& model, const CVector& gains, const CVector& y)
{
    return mle_weights(model, gains).dot(y);
}

CVector simulate_measurement(const EstimationModel& model, const CVector& gains, cdouble theta,
                             std::mt19937_64& rng)
{
    const int n = model.num_sensors();
    CVector amplified(n);
    for (int k = 0; k < n; ++k)
        amplified(k) = gains(k) * (theta + circular_normal(rng, model.sensor_noise_var(k)));
    CVector y = model.channel * amplified;
    for (Eigen::Index r = 0; r < y.size(); ++r)
        y(r) += circular_normal(rng, model.noise_var);
    return y;
}

CVector simulate_measurement(const CentralizedScenario& scenario, const CVector& gains,
                             std::mt19937_64& rng)
{
    return simulate_measurement(scenario.model(), gains, scenario.theta, rng);
}

CVector simulate_measurement(const DecentralizedScenario& scenario, const CVector& gains,
                             const CompressionPlan& plan, std::mt19937_64& rng)
{
    return gather_observation(plan, scenario, simulate_reception(scenario, gains, rng));
}

Reception simulate_reception(const DecentralizedScenario& scenario, const CVector& gains,
                             std::mt19937_64& rng)
{
    const int n = scenario.num_nodes();
    std::vector<cdouble> observation(n);
    for (int k = 0; k < n; ++k)
        observation[k] = scenario.theta + circular_normal(rng, scenario.sensor_noise_var(k));

    Reception out;
    out.received.resize(n);
    for (int rx = 0; rx < n; ++rx) {
        auto nb = scenario.topology.neighbors(rx);
        out.received[rx].resize(nb.size());
        for (std::size_t slot = 0; slot < nb.size(); ++slot) {
            int tx = nb[slot];
            out.received[rx][slot] = scenario.link_gain[rx][slot] * gains(tx) * observation[tx] +
                                     circular_normal(rng, scenario.comm_noise_var);
        }
    }
    return out;
}

CVector gather_observation(const CompressionPlan& plan, const DecentralizedScenario& scenario,
                           const Reception& reception)
{
    CVector y(plan.m_dim);
    int row = 0;
    for (int sink = 0; sink < scenario.num_nodes(); ++sink)
        for (int parent : plan.retained_rows[sink])
            y(row++) = reception.received[sink][scenario.topology.neighbor_slot(sink, parent)];
    return y;
}

LocalEstimate local_mle(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                        std::span<const cdouble> received)
{
    return local_mle(sink, gains, scenario, received, scenario.topology.neighbors(sink));
}

LocalEstimate local_mle(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                        std::span<const cdouble> received, std::span<const int> parents)
{
    if (static_cast<int>(received.size()) != scenario.topology.degree(sink))
        throw Error(ErrorCode::InvalidConfig, "received vector does not match neighborhood");
    double info = 0.0;
    cdouble state = 0.0;
    for (int k : parents) {
        cdouble s = scenario.gain(sink, k) * gains(k);
        double w = 1.0 / (std::norm(s) * scenario.sensor_noise_var(k) + scenario.comm_noise_var);
        info += std::norm(s) * w;
        state += std::conj(s) * w * received[scenario.topology.neighbor_slot(sink, k)];
    }
    if (!(info >= kMinInformation))
        throw Error(ErrorCode::DegenerateGains,
                    "node " + std::to_string(sink) + " receives no information");
    return {state / info, 1.0 / info};
}

AdmmState admm_init(const RVector& x, double rho)
{
    return AdmmState{x, RVector::Zero(x.size()), rho, 0};
}

AdmmState admm_step(const AdmmState& state, const Topology& topology, const RVector& x)
{
    const int n = topology.num_nodes();
    const double rho = state.rho;
    AdmmState next{RVector(n), RVector(n), rho, state.iteration + 1};
    for (int i = 0; i < n; ++i) {
        const double d = topology.degree(i);
        double sum = 0.0;
        for (int j : topology.neighbors(i))
            sum += state.y(j);
        next.y(i) = (rho * d * state.y(i) + rho * sum - state.lambda(i) + x(i)) /
                    (1.0 + 2.0 * rho * d);
    }
    for (int i = 0; i < n; ++i) {
        const double d = topology.degree(i);
        double sum = 0.0;
        for (int j : topology.neighbors(i))
            sum += next.y(j);
        next.lambda(i) = state.lambda(i) + rho * (d * next.y(i) - sum);
    }
    return next;
}

EstimateReport run_consensus(const DecentralizedScenario& scenario, const CVector& gains,
                             const CompressionPlan& plan, const Reception& reception,
                             const ConsensusOptions& options)
{
    if (!(options.tol > 0.0) || !(options.rho > 0.0) || options.max_iter < 0)
        throw Error(ErrorCode::InvalidConfig, "consensus needs tol > 0, rho > 0, max_iter >= 0");
    check_plan(plan, scenario.topology);

    const int n = scenario.num_nodes();
    const auto& topo = scenario.topology;

    EstimateReport report;
    report.initial_information.resize(n);
    report.initial_state.resize(n);
    for (int i = 0; i < n; ++i) {
        double info = 0.0;
        cdouble state = 0.0;
        for (int k : plan.retained_rows[i]) {
            cdouble s = scenario.gain(i, k) * gains(k);
            double w =
                1.0 / (std::norm(s) * scenario.sensor_noise_var(k) + scenario.comm_noise_var);
            info += std::norm(s) * w;
            state += std::conj(s) * w * reception.received[i][topo.neighbor_slot(i, k)];
        }
        report.initial_information(i) = info;
        report.initial_state(i) = state;
    }
    const double total_info = report.initial_information.sum();
    if (!(total_info >= kMinInformation))
        throw Error(ErrorCode::DegenerateGains, "network carries no information");
    report.theta_hat = report.initial_state.sum() / total_info;
    report.analytic_variance = 1.0 / total_info;

    const RVector x_info = report.initial_information;
    const RVector x_re = report.initial_state.real();
    const RVector x_im = report.initial_state.imag();
    AdmmState s_info = admm_init(x_info, options.rho);
    AdmmState s_re = admm_init(x_re, options.rho);
    AdmmState s_im = admm_init(x_im, options.rho);

    const cdouble unset(std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN());
    std::vector<cdouble> current(n, unset);

    auto update_estimates = [&] {
        for (int i = 0; i < n; ++i)
            if (std::abs(s_info.y(i)) > kMinNodeInformation)
                current[i] = cdouble(s_re.y(i), s_im.y(i)) / s_info.y(i);
        report.per_node_trace.push_back(current);
    };

    const double target_scale = std::abs(report.theta_hat);
    auto converged = [&](int k) {
        const auto& now = report.per_node_trace.back();
        for (int i = 0; i < n; ++i) {
            if (std::isnan(now[i].real()))
                return false;
            if (options.stop == StopRule::KnownTarget) {
                if (std::abs(now[i] - report.theta_hat) > options.tol * target_scale)
                    return false;
            } else {
                if (k == 0)
                    return false;
                const auto& prev = report.per_node_trace[k - 1][i];
                if (std::isnan(prev.real()) ||
                    std::abs(now[i] - prev) > options.tol * std::abs(now[i]))
                    return false;
            }
        }
        return true;
    };

    update_estimates();
    if (converged(0)) {
        report.iterations_to_tol = 0;
        return report;
    }
    for (int k = 1; k <= options.max_iter; ++k) {
        s_info = admm_step(s_info, topo, x_info);
        s_re = admm_step(s_re, topo, x_re);
        s_im = admm_step(s_im, topo, x_im);
        update_estimates();
        if (converged(k)) {
            report.iterations_to_tol = k;
            return report;
        }
    }
    throw ConsensusNotConverged(std::move(report));
}

}  // namespace wsngain
