// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <span>
#include <vector>

#include "wsngain/diffusion.hpp"
#include "wsngain/error.hpp"
#include "wsngain/model.hpp"
#include "wsngain/scenario.hpp"

namespace wsngain {

/// H D V D^H H^H + sigma_n^2 I.
CMatrix noise_covariance(const EstimationModel& model, const CVector& gains);

/// a^H H^H R_w^{-1} H a; the inverse of the ML variance.
double information(const EstimationModel& model, const CVector& gains);

/// (a^H H^H R_w^{-1} H a)^{-1}. Throws DegenerateGains when the information
/// underflows 1e-300.
double global_variance(const EstimationModel& model, const CVector& gains);

/// Linear combiner w with theta_hat = w^H y.
CVector mle_weights(const EstimationModel& model, const CVector& gains);

cdouble global_mle(const EstimationModel& model, const CVector& gains, const CVector& y);

/// Draws y = H a theta + H D v + n.
CVector simulate_measurement(const EstimationModel& model, const CVector& gains, cdouble theta,
                             std::mt19937_64& rng);
CVector simulate_measurement(const CentralizedScenario& scenario, const CVector& gains,
                             std::mt19937_64& rng);
/// Compressed global observation (rows ordered like assemble_global_model).
CVector simulate_measurement(const DecentralizedScenario& scenario, const CVector& gains,
                             const CompressionPlan& plan, std::mt19937_64& rng);

/// Everything every node hears in one amplify-and-forward round:
/// received[rx][slot] = h_{rx,tx} a_tx z_tx + n, with one shared z_tx per sender.
struct Reception {
    std::vector<std::vector<cdouble>> received;
};

Reception simulate_reception(const DecentralizedScenario& scenario, const CVector& gains,
                             std::mt19937_64& rng);

/// Retained rows of a reception, stacked in global-model order.
CVector gather_observation(const CompressionPlan& plan, const DecentralizedScenario& scenario,
                           const Reception& reception);

struct LocalEstimate {
    cdouble theta;
    double variance = 0.0;
};

/// ML estimate at `sink` from its neighborhood; `received` is aligned with
/// the sink's neighbor sequence.
LocalEstimate local_mle(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                        std::span<const cdouble> received);
/// Same, using only the listed parents (e.g. the rows the sink retains).
LocalEstimate local_mle(int sink, const CVector& gains, const DecentralizedScenario& scenario,
                        std::span<const cdouble> received, std::span<const int> parents);

/// One real ADMM average-consensus stream.
struct AdmmState {
    RVector y;
    RVector lambda;
    double rho = 1.0;
    int iteration = 0;
};

/// y = x, lambda = 0.
AdmmState admm_init(const RVector& x, double rho);

/// Synchronous round: every node reads its neighbors' previous values.
AdmmState admm_step(const AdmmState& state, const Topology& topology, const RVector& x);

enum class StopRule {
    KnownTarget,        // compare against the analytic global MLE
    TrailingDifference, // stop once no node moves more than tol (relative)
};

struct ConsensusOptions {
    int max_iter = 500;
    double tol = 1e-6;
    double rho = 1.0;
    StopRule stop = StopRule::KnownTarget;
};

struct EstimateReport {
    cdouble theta_hat;       // global MLE the network converges to
    double analytic_variance = 0.0;
    RVector initial_information;  // I_i(0) over retained rows
    CVector initial_state;        // P_i(0)
    /// per_node_trace[k][i]; NaN until node i has a usable I_i(k).
    std::vector<std::vector<cdouble>> per_node_trace;
    int iterations_to_tol = -1;
};

/// Raised when consensus misses the tolerance; carries the trace.
class ConsensusNotConverged : public Error {
public:
    explicit ConsensusNotConverged(EstimateReport report)
        : Error(ErrorCode::NoConvergence, "consensus did not reach tolerance"),
          report_(std::move(report))
    {}
    const EstimateReport& report() const noexcept { return report_; }

private:
    EstimateReport report_;
};

/// Runs the information (I) and state (P) consensus streams; node i reports
/// P_i(k) / I_i(k). P is complex and runs as two real streams.
EstimateReport run_consensus(const DecentralizedScenario& scenario, const CVector& gains,
                             const CompressionPlan& plan, const Reception& reception,
                             const ConsensusOptions& options = {});

}  // namespace wsngain
