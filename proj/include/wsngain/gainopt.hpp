// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "wsngain/gains.hpp"
#include "wsngain/model.hpp"
#include "wsngain/scenario.hpp"

namespace wsngain {

/// Tuning knobs of the cyclic gain optimizer.
struct OptimizerConfig {
    double eta0_margin = 1.1;    // eta0 = margin * N ||H||_F^2 / sigma_n^2
    double lambda_margin = 1.05; // lambda = margin * lambda_max(Q) estimate
    int inner_iters = 50;        // L, cap on power-method steps per outer iteration
    double outer_tol = 1e-8;     // xi, stop once |eta_k - eta_{k+1}| <= xi
    int max_outer = 200;
    int restarts = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Sufficient eta0 keeping eta positive for every gain vector with
/// ||a||^2 <= N: margin * N ||H||_F^2 / sigma_n^2.
double eta0_bound(const EstimationModel& model, double margin = 1.1);

/// eta = eta0 - a^H H^H R_w^{-1} H a, evaluated directly.
double eta_value(const EstimationModel& model, const CVector& gains, double eta0);

/// Bordered matrix [[eta0, (Ha)^H], [Ha, H D V D^H H^H + sigma_n^2 I]].
struct LiftedMatrix {
    CMatrix R;
    double eta0 = 0.0;

    int dim() const { return static_cast<int>(R.rows()); }
};

/// Throws Eta0TooSmall if e1^H R^{-1} e1 shows eta <= 0.
LiftedMatrix build_lifted(const EstimationModel& model, const CVector& gains, double eta0);

/// Minimizer of y^H R y subject to y_1 = 1, i.e. R^{-1} e1 scaled to a unit
/// first entry. Computed from the orthogonal complement of rows 2..M+1 of R
/// (modified Gram-Schmidt, two passes); falls back to a direct solve when the
/// complement is numerically empty. `used_fallback` reports which route ran.
CVector solve_auxiliary(const LiftedMatrix& lifted, bool* used_fallback = nullptr);

/// y^H R y.
double lifted_objective(const LiftedMatrix& lifted, const CVector& y);

/// Quadratic form in (a; 1) obtained by fixing the auxiliary vector:
/// y^H R y = c1 + (a;1)^H Q (a;1).
struct InnerQuadratic {
    CMatrix Q;        // (N+1) x (N+1), Hermitian
    double c1 = 0.0;  // eta0 + sigma_n^2 ||y_tail||^2
};

InnerQuadratic build_inner_quadratic(const CVector& y_tail, const EstimationModel& model,
                                     double eta0);

/// Q~ = lambda I - Q with lambda > lambda_max(Q), so Q~ is positive definite.
struct ShiftedQuadratic {
    CMatrix Qt;
    double lambda = 0.0;
};

ShiftedQuadratic shift_quadratic(const CMatrix& Q, double margin = 1.05);

/// Nearest feasible point (in (a;1) distance) to a_hat.
struct Projection {
    CVector a;
    /// Set when a_hat had no usable direction (zero vector) and a fixed
    /// feasible point was returned instead.
    bool degenerate = false;
};

Projection project(const CVector& a_hat, const ConstraintSpec& constraint);

/// (a;1)^H Q~ (a;1).
double shifted_objective(const CMatrix& Qt, const CVector& a);

struct InnerResult {
    CVector a;
    std::vector<double> objective;  // objective before step 0 and after every step
    int iterations = 0;
};

/// a <- project(first N entries of Q~ (a;1)) for at most `max_iters` steps,
/// stopping early once a step moves less than `step_tol`.
InnerResult inner_power_iterations(const CVector& a0, const CMatrix& Qt,
                                   const ConstraintSpec& constraint, int max_iters,
                                   double step_tol = 1e-10);

struct OptimizerTrace {
    std::vector<double> eta_per_outer;  // eta at the start and after each outer iteration
    std::vector<std::vector<double>> inner_objective;
    /// |y^H R y - eta| / |eta| after each auxiliary update.
    std::vector<double> stationarity_residual;
    /// |y^H R y - c1 - (a;1)^H Q (a;1)| / |y^H R y| at each inner quadratic.
    std::vector<double> lift_residual;
    GainVector final_gains;
    double final_variance = 0.0;
    double initial_variance = 0.0;
    double eta0 = 0.0;
    double wall_time_s = 0.0;
    int outer_iters = 0;
    int inner_iters_total = 0;
    int auxiliary_fallbacks = 0;
    int restart_index = 0;
    std::vector<double> restart_variances;
};

/// Deterministic starting point: projection of the all-ones vector.
CVector initial_gains(const ConstraintSpec& constraint, int num_sensors);

/// Random point of the constraint set (uniform phases, normalized Gaussian
/// energies, uniform supports).
CVector random_feasible(const ConstraintSpec& constraint, int num_sensors, std::mt19937_64& rng);

/// Rounds the unimodular fast-path solution onto the Q-ary alphabet, trying
/// several common phase offsets, and keeps the lowest-variance rounding.
CVector quantized_warm_start(const EstimationModel& model, int levels,
                             const OptimizerConfig& config = {});

/// Projects the all-sensor optimum (fixed energy, or unit modulus in phase
/// mode) onto the selection set.
CVector selection_warm_start(const EstimationModel& model, const SensorSelect& select,
                             const OptimizerConfig& config = {});

/// Minimizes the ML variance over the constraint set by alternating between
/// power-method updates of the gains and closed-form auxiliary updates.
/// Restart 0 starts from `initial` (or initial_gains; for quantized phases
/// and selection the better of that and the matching warm start); the others from random
/// feasible points. Returns the best restart.
std::pair<GainVector, OptimizerTrace> optimize(const EstimationModel& model,
                                               const ConstraintSpec& constraint,
                                               const OptimizerConfig& config = {},
                                               const std::optional<CVector>& initial = {});

/// B = H^H (H V H^H + sigma_n^2 I)^{-1} H; for unit-modulus gains the
/// information equals a^H B a.
CMatrix uqp_matrix(const EstimationModel& model);

/// Phase-only design as a unimodular quadratic program:
/// a <- exp(j arg(B a)) until a fixed point. eta_per_outer holds eta0 - a^H B a.
std::pair<GainVector, OptimizerTrace> optimize_phase_only_uqp(const EstimationModel& model,
                                                              const OptimizerConfig& config = {});

/// Decentralized design. The compression plan follows the gains: it is rebuilt
/// after every outer iteration unless `refresh_plan` is false. The reported
/// variance uses the plan in force: the one the final gains induce, or the
/// plan of the starting gains when frozen.
std::pair<GainVector, OptimizerTrace> optimize_decentralized(const DecentralizedScenario& scenario,
                                                             const ConstraintSpec& constraint,
                                                             const OptimizerConfig& config = {},
                                                             bool refresh_plan = true);

}  // namespace wsngain
