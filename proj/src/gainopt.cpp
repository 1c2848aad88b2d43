// SPDX-License-Identifier: Apache-2.0
#include "wsngain/gainopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wsngain/diffusion.hpp"
#include "wsngain/error.hpp"
#include "wsngain/estimator.hpp"

namespace wsngain {

namespace {

constexpr double kPhaseStepTol = 1e-10;
constexpr double kDescentSlack = 1e-9;
constexpr double kLambdaFloor = 1e-12;
constexpr int kLambdaPowerSteps = 30;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

CVector unit_phases(const CVector& v)
{
    CVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out(i) = std::polar(1.0, std::arg(v(i)));
    return out;
}

// Indices of the `k` largest magnitudes; equal magnitudes keep the lower index.
std::vector<int> top_k_support(const CVector& v, int k)
{
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
    order.resize(k);
    return order;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x5eedu};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Valid eta0 for every plan the gains could induce: the per-column channel
// energy is bounded by the strongest incoming link of that node.
double decentralized_eta0(const DecentralizedScenario& s, double margin)
{
    double frob = 0.0;
    for (int k = 0; k < s.num_nodes(); ++k) {
        double best = 0.0;
        for (int i : s.topology.neighbors(k))
            best = std::max(best, std::norm(s.gain(i, k)));
        frob += best;
    }
    return margin * s.num_nodes() * frob / s.comm_noise_var;
}

struct CyclicContext {
    const DecentralizedScenario* decentralized = nullptr;
    bool refresh_plan = false;
};

struct RunResult {
    CVector best;
    OptimizerTrace trace;
};

RunResult run_cyclic(EstimationModel model, const ConstraintSpec& constraint,
                     const OptimizerConfig& config, CVector a, double eta0,
                     const CyclicContext& ctx)
{
    const int n = model.num_sensors();
    RunResult out;
    auto& trace = out.trace;
    trace.eta0 = eta0;

    auto refresh = [&](const CVector& gains) {
        if (ctx.decentralized && ctx.refresh_plan)
            model = compressed_model(gains, *ctx.decentralized).model;
    };

    LiftedMatrix lifted = build_lifted(model, a, eta0);
    bool fallback = false;
    CVector y = solve_auxiliary(lifted, &fallback);
    trace.auxiliary_fallbacks += fallback;
    double eta = eta_value(model, a, eta0);
    trace.stationarity_residual.push_back(std::abs(lifted_objective(lifted, y) - eta) /
                                          std::abs(eta));
    trace.eta_per_outer.push_back(eta);
    trace.initial_variance = global_variance(model, a);

    out.best = a;
    double best_var = trace.initial_variance;

    for (int k = 0; k < config.max_outer; ++k) {
        const int m = model.num_rows();
        InnerQuadratic iq = build_inner_quadratic(y.tail(m), model, eta0);
        {
            CVector ext(n + 1);
            ext.head(n) = a;
            ext(n) = 1.0;
            double g = lifted_objective(lifted, y);
            double split = iq.c1 + ext.dot(iq.Q * ext).real();
            trace.lift_residual.push_back(std::abs(g - split) / std::abs(g));
        }
        ShiftedQuadratic sq = shift_quadratic(iq.Q, config.lambda_margin);
        InnerResult inner =
            inner_power_iterations(a, sq.Qt, constraint, config.inner_iters, kPhaseStepTol);
        a = inner.a;
        trace.inner_iters_total += inner.iterations;
        trace.inner_objective.push_back(std::move(inner.objective));

        lifted = build_lifted(model, a, eta0);
        y = solve_auxiliary(lifted, &fallback);
        trace.auxiliary_fallbacks += fallback;
        double eta_next = eta_value(model, a, eta0);
        trace.stationarity_residual.push_back(std::abs(lifted_objective(lifted, y) - eta_next) /
                                              std::abs(eta_next));
        if (eta_next > eta + kDescentSlack * std::abs(eta))
            throw Error(ErrorCode::NoDescent, "eta increased across an outer iteration");

        if (ctx.decentralized && ctx.refresh_plan) {
            refresh(a);
            lifted = build_lifted(model, a, eta0);
            y = solve_auxiliary(lifted, &fallback);
            trace.auxiliary_fallbacks += fallback;
            eta_next = eta_value(model, a, eta0);
        }
        trace.eta_per_outer.push_back(eta_next);
        ++trace.outer_iters;

        double var = global_variance(model, a);
        if (var < best_var) {
            best_var = var;
            out.best = a;
        }
        if (std::abs(eta - eta_next) <= config.outer_tol)
            break;
        eta = eta_next;
    }
    trace.final_variance = best_var;
    return out;
}

}  // namespace

void OptimizerConfig::validate() const
{
    if (!(eta0_margin > 1.0) || !(lambda_margin > 1.0))
        throw Error(ErrorCode::InvalidConfig, "eta0 and lambda margins must exceed 1");
    if (inner_iters < 1 || max_outer < 1 || restarts < 1)
        throw Error(ErrorCode::InvalidConfig, "iteration counts and restarts must be positive");
    if (!(outer_tol > 0.0))
        throw Error(ErrorCode::InvalidConfig, "outer tolerance must be positive");
}

double eta0_bound(const EstimationModel& model, double margin)
{
    return margin * model.num_sensors() * model.channel.squaredNorm() / model.noise_var;
}

double eta_value(const EstimationModel& model, const CVector& gains, double eta0)
{
    return eta0 - information(model, gains);
}

LiftedMatrix build_lifted(const EstimationModel& model, const CVector& gains, double eta0)
{
    const int m = model.num_rows();
    CVector signal = model.channel * gains;
    LiftedMatrix out;
    out.eta0 = eta0;
    out.R.resize(m + 1, m + 1);
    out.R(0, 0) = eta0;
    out.R.block(1, 0, m, 1) = signal;
    out.R.block(0, 1, 1, m) = signal.adjoint();
    out.R.bottomRightCorner(m, m) = noise_covariance(model, gains);
    if (!(eta_value(model, gains, eta0) > 0.0))
        throw Error(ErrorCode::Eta0TooSmall, "eta0 too small: eta is not positive");
    return out;
}

CVector solve_auxiliary(const LiftedMatrix& lifted, bool* used_fallback)
{
    const CMatrix& R = lifted.R;
    const Eigen::Index n = R.rows();

    // y must be orthogonal to conj(row k) for every k >= 1
    std::vector<CVector> basis;
    basis.reserve(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        CVector w = R.row(k).adjoint();
        const double scale = w.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis)
                w -= q * q.dot(w);
        const double len = w.norm();
        if (len > 1e-14 * scale)
            basis.push_back(w / len);
    }

    CVector p = CVector::Unit(n, 0);
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis)
            p -= q * q.dot(p);

    if (p.norm() < 1e-12 * R.norm() || std::abs(p(0)) == 0.0) {
        if (used_fallback)
            *used_fallback = true;
        CVector y = R.partialPivLu().solve(CVector::Unit(n, 0));
        return y / y(0);
    }
    if (used_fallback)
        *used_fallback = false;
    return p / p(0);
}

double lifted_objective(const LiftedMatrix& lifted, const CVector& y)
{
    return y.dot(lifted.R * y).real();
}

InnerQuadratic build_inner_quadratic(const CVector& y_tail, const EstimationModel& model,
                                     double eta0)
{
    const int n = model.num_sensors();
    CVector b = model.channel.adjoint() * y_tail;
    InnerQuadratic out;
    out.Q = CMatrix::Zero(n + 1, n + 1);
    // (H^H y y^H H) o V with V diagonal keeps only the diagonal |b_i|^2 v_i
    for (int i = 0; i < n; ++i)
        out.Q(i, i) = std::norm(b(i)) * model.sensor_noise_var(i);
    out.Q.block(0, n, n, 1) = b;
    out.Q.block(n, 0, 1, n) = b.adjoint();
    out.c1 = eta0 + model.noise_var * y_tail.squaredNorm();
    return out;
}

ShiftedQuadratic shift_quadratic(const CMatrix& Q, double margin)
{
    const Eigen::Index n = Q.rows();
    const double frob = Q.norm();
    ShiftedQuadratic out;
    if (frob == 0.0) {
        out.lambda = kLambdaFloor;
        out.Qt = CMatrix::Identity(n, n) * out.lambda;
        return out;
    }

    // power iteration on Q + ||Q||_F I, whose top eigenvalue is lambda_max + ||Q||_F
    CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
    double estimate = 0.0;
    for (int it = 0; it < kLambdaPowerSteps; ++it) {
        CVector w = Q * v + frob * v;
        double len = w.norm();
        if (len == 0.0)
            break;
        v = w / len;
    }
    estimate = v.dot(Q * v).real();

    auto shifted = [&](double lambda) {
        CMatrix qt = -Q;
        qt.diagonal().array() += lambda;
        return qt;
    };

    if (estimate > 0.0) {
        out.lambda = margin * estimate;
        out.Qt = shifted(out.lambda);
        if (Eigen::LLT<CMatrix>(out.Qt).info() == Eigen::Success)
            return out;
    }
    out.lambda = margin * frob;
    out.Qt = shifted(out.lambda);
    return out;
}

Projection project(const CVector& a_hat, const ConstraintSpec& constraint)
{
    const int n = static_cast<int>(a_hat.size());
    const double root_n = std::sqrt(static_cast<double>(n));
    Projection out;

    if (std::holds_alternative<FixedEnergy>(constraint)) {
        const double len = a_hat.norm();
        if (len == 0.0) {
            out.a = CVector::Ones(n);
            out.degenerate = true;
        } else {
            out.a = (root_n / len) * a_hat;
        }
        return out;
    }
    if (std::holds_alternative<PhaseOnly>(constraint)) {
        out.a = unit_phases(a_hat);
        return out;
    }
    if (auto q = std::get_if<QuantizedPhase>(&constraint)) {
        const double step = 2.0 * std::numbers::pi / q->levels;
        out.a.resize(n);
        for (int i = 0; i < n; ++i) {
            double phase = std::arg(a_hat(i));
            if (phase < 0.0)
                phase += 2.0 * std::numbers::pi;
            double t = phase / step;
            double level = std::floor(t);
            if (t - level > 0.5)  // exact halves round down to the smaller phase
                level += 1.0;
            int idx = static_cast<int>(level) % q->levels;
            out.a(i) = std::polar(1.0, idx * step);
        }
        return out;
    }

    const auto& sel = std::get<SensorSelect>(constraint);
    const int k = sel.active;
    out.a = CVector::Zero(n);
    std::vector<int> support = top_k_support(a_hat, k);
    if (sel.mode == SensorSelect::Mode::Phase) {
        const double modulus = std::sqrt(static_cast<double>(n) / k);
        for (int i : support)
            out.a(i) = std::polar(modulus, std::arg(a_hat(i)));
        return out;
    }
    double len = 0.0;
    for (int i : support)
        len += std::norm(a_hat(i));
    len = std::sqrt(len);
    if (len == 0.0) {
        out.a.head(k).setConstant(std::sqrt(static_cast<double>(n) / k));
        out.degenerate = true;
        return out;
    }
    for (int i : support)
        out.a(i) = (root_n / len) * a_hat(i);
    return out;
}

double shifted_objective(const CMatrix& Qt, const CVector& a)
{
    const Eigen::Index n = a.size();
    CVector ext(n + 1);
    ext.head(n) = a;
    ext(n) = 1.0;
    return ext.dot(Qt * ext).real();
}

InnerResult inner_power_iterations(const CVector& a0, const CMatrix& Qt,
                                   const ConstraintSpec& constraint, int max_iters,
                                   double step_tol)
{
    const Eigen::Index n = a0.size();
    InnerResult out;
    out.a = a0;
    out.objective.push_back(shifted_objective(Qt, a0));
    CVector ext(n + 1);
    for (int t = 0; t < max_iters; ++t) {
        ext.head(n) = out.a;
        ext(n) = 1.0;
        CVector image = Qt.topRows(n) * ext;
        CVector next = project(image, constraint).a;
        const double moved = (next - out.a).norm();
        out.a = std::move(next);
        ++out.iterations;
        out.objective.push_back(shifted_objective(Qt, out.a));
        if (moved <= step_tol)
            break;
    }
    return out;
}

CVector initial_gains(const ConstraintSpec& constraint, int num_sensors)
{
    return project(CVector::Ones(num_sensors), constraint).a;
}

CVector random_feasible(const ConstraintSpec& constraint, int num_sensors, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const int n = num_sensors;

    if (std::holds_alternative<FixedEnergy>(constraint)) {
        CVector v(n);
        for (int i = 0; i < n; ++i) {
            double re = gauss(rng);
            double im = gauss(rng);
            v(i) = cdouble(re, im);
        }
        return project(v, constraint).a;
    }
    if (std::holds_alternative<PhaseOnly>(constraint)) {
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = std::polar(1.0, phase(rng));
        return v;
    }
    if (auto q = std::get_if<QuantizedPhase>(&constraint)) {
        std::uniform_int_distribution<int> level(0, q->levels - 1);
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = std::polar(1.0, 2.0 * std::numbers::pi * level(rng) / q->levels);
        return v;
    }
    const auto& sel = std::get<SensorSelect>(constraint);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    CVector v = CVector::Zero(n);
    for (int j = 0; j < sel.active; ++j) {
        if (sel.mode == SensorSelect::Mode::Phase) {
            v(idx[j]) = std::polar(1.0, phase(rng));
        } else {
            double re = gauss(rng);
            double im = gauss(rng);
            v(idx[j]) = cdouble(re, im);
        }
    }
    return project(v, constraint).a;
}

namespace {

std::pair<GainVector, OptimizerTrace> best_of_restarts(
    const EstimationModel& model, const ConstraintSpec& constraint, const OptimizerConfig& config,
    const std::optional<CVector>& initial, double eta0, const CyclicContext& ctx)
{
    config.validate();
    const int n = model.num_sensors();
    validate_constraint(constraint, n);
    if (initial && initial->size() != n)
        throw Error(ErrorCode::InvalidConfig, "initial gains have the wrong length");

    const auto start = Clock::now();
    std::optional<RunResult> best;
    std::vector<double> variances;
    int best_restart = 0;
    for (int r = 0; r < config.restarts; ++r) {
        CVector a0;
        if (r == 0) {
            a0 = initial ? project(*initial, constraint).a : initial_gains(constraint, n);
            if (const auto* q = std::get_if<QuantizedPhase>(&constraint); q && !initial) {
                CVector warm = quantized_warm_start(model, q->levels, config);
                if (global_variance(model, warm) < global_variance(model, a0))
                    a0 = std::move(warm);
            }
            if (const auto* sel = std::get_if<SensorSelect>(&constraint); sel && !initial) {
                CVector warm = selection_warm_start(model, *sel, config);
                if (global_variance(model, warm) < global_variance(model, a0))
                    a0 = std::move(warm);
            }
        } else {
            std::mt19937_64 rng(restart_seed(config.seed, r));
            a0 = random_feasible(constraint, n, rng);
        }
        EstimationModel start_model = model;
        if (ctx.decentralized && ctx.refresh_plan)
            start_model = compressed_model(a0, *ctx.decentralized).model;
        RunResult run = run_cyclic(std::move(start_model), constraint, config, a0, eta0, ctx);
        variances.push_back(run.trace.final_variance);
        if (!best || run.trace.final_variance < best->trace.final_variance) {
            best = std::move(run);
            best_restart = r;
        }
    }

    OptimizerTrace trace = std::move(best->trace);
    trace.final_gains = GainVector{best->best, constraint};
    trace.restart_index = best_restart;
    trace.restart_variances = std::move(variances);
    trace.wall_time_s = seconds_since(start);
    return {trace.final_gains, std::move(trace)};
}

}  // namespace

std::pair<GainVector, OptimizerTrace> optimize(const EstimationModel& model,
                                               const ConstraintSpec& constraint,
                                               const OptimizerConfig& config,
                                               const std::optional<CVector>& initial)
{
    return best_of_restarts(model, constraint, config, initial,
                            eta0_bound(model, config.eta0_margin), CyclicContext{});
}

CVector quantized_warm_start(const EstimationModel& model, int levels,
                             const OptimizerConfig& config)
{
    OptimizerConfig single = config;
    single.restarts = 1;
    const CVector phases = optimize_phase_only_uqp(model, single).first.values;
    // the variance ignores a common phase, the rounding does not
    constexpr int kOffsets = 16;
    CVector best;
    double best_var = 0.0;
    for (int j = 0; j < kOffsets; ++j) {
        const cdouble turn = std::polar(1.0, 2.0 * std::numbers::pi * j / (kOffsets * levels));
        CVector cand = project(phases * turn, QuantizedPhase{levels}).a;
        const double var = global_variance(model, cand);
        if (j == 0 || var < best_var) {
            best_var = var;
            best = std::move(cand);
        }
    }
    return best;
}

CVector selection_warm_start(const EstimationModel& model, const SensorSelect& select,
                             const OptimizerConfig& config)
{
    OptimizerConfig single = config;
    single.restarts = 1;
    const CVector relaxed = select.mode == SensorSelect::Mode::Phase
                                ? optimize_phase_only_uqp(model, single).first.values
                                : optimize(model, FixedEnergy{}, single).first.values;
    return project(relaxed, select).a;
}

CMatrix uqp_matrix(const EstimationModel& model)
{
    CMatrix core = model.channel * model.sensor_noise_var.asDiagonal() * model.channel.adjoint();
    core.diagonal().array() += model.noise_var;
    CMatrix b = model.channel.adjoint() * Eigen::LLT<CMatrix>(core).solve(model.channel);
    return (b + b.adjoint()) / 2.0;
}

std::pair<GainVector, OptimizerTrace> optimize_phase_only_uqp(const EstimationModel& model,
                                                              const OptimizerConfig& config)
{
    config.validate();
    const int n = model.num_sensors();
    const auto start = Clock::now();
    const CMatrix B = uqp_matrix(model);
    const double eta0 = eta0_bound(model, config.eta0_margin);
    const long max_iters = static_cast<long>(config.max_outer) * config.inner_iters;

    std::optional<OptimizerTrace> best;
    std::vector<double> variances;
    for (int r = 0; r < config.restarts; ++r) {
        CVector a;
        if (r == 0) {
            a = CVector::Ones(n);
        } else {
            std::mt19937_64 rng(restart_seed(config.seed, r));
            a = random_feasible(PhaseOnly{}, n, rng);
        }
        OptimizerTrace trace;
        trace.eta0 = eta0;
        std::vector<double> objective;
        double obj = a.dot(B * a).real();
        objective.push_back(obj);
        trace.eta_per_outer.push_back(eta0 - obj);
        trace.initial_variance = 1.0 / obj;
        for (long k = 0; k < max_iters; ++k) {
            CVector next = unit_phases(B * a);
            const double moved = (next - a).norm();
            const double next_obj = next.dot(B * next).real();
            a = std::move(next);
            objective.push_back(next_obj);
            trace.eta_per_outer.push_back(eta0 - next_obj);
            ++trace.outer_iters;
            const bool settled =
                moved <= kPhaseStepTol || std::abs(next_obj - obj) <= config.outer_tol;
            obj = next_obj;
            if (settled)
                break;
        }
        trace.inner_iters_total = trace.outer_iters;
        trace.inner_objective.push_back(std::move(objective));
        trace.final_variance = global_variance(model, a);
        trace.final_gains = GainVector{a, PhaseOnly{}};
        trace.restart_index = r;
        variances.push_back(trace.final_variance);
        if (!best || trace.final_variance < best->final_variance)
            best = std::move(trace);
    }
    best->restart_variances = std::move(variances);
    best->wall_time_s = seconds_since(start);
    return {best->final_gains, std::move(*best)};
}

std::pair<GainVector, OptimizerTrace> optimize_decentralized(const DecentralizedScenario& scenario,
                                                             const ConstraintSpec& constraint,
                                                             const OptimizerConfig& config,
                                                             bool refresh_plan)
{
    const int n = scenario.num_nodes();
    CVector a0 = initial_gains(constraint, n);
    EstimationModel model = compressed_model(a0, scenario).model;
    CyclicContext ctx{&scenario, refresh_plan};
    return best_of_restarts(model, constraint, config, std::nullopt,
                            decentralized_eta0(scenario, config.eta0_margin), ctx);
}

}  // namespace wsngain
