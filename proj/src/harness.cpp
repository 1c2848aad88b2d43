// SPDX-License-Identifier: Apache-2.0
#include "wsngain/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "wsngain/diffusion.hpp"
#include "wsngain/error.hpp"
#include "wsngain/estimator.hpp"

namespace wsngain {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct Sample {
    bool ok = false;
    double variance = 0.0;
    double runtime = 0.0;
};

struct MethodOutcome {
    double variance;
    double runtime;
};

MethodOutcome run_method(const std::string& method, const EstimationModel& model,
                         const ExperimentConfig& config)
{
    const auto start = Clock::now();
    double variance = 0.0;
    if (method == "all-ones") {
        variance = baseline_all_ones(model).second;
    } else if (method == "uqp") {
        variance = optimize_phase_only_uqp(model, config.optimizer).second.final_variance;
    } else if (method == "opt") {
        variance = optimize(model, config.constraint, config.optimizer).second.final_variance;
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown method '" + method + "'");
    }
    double runtime = std::chrono::duration<double>(Clock::now() - start).count();
    return {variance, config.record_timing ? runtime : 0.0};
}

// Fixed-order reduction keeps the means bit-reproducible.
SweepRow reduce(double x, const std::string& method, const std::vector<Sample>& samples)
{
    SweepRow row;
    row.x = x;
    row.method = method;
    double var_sum = 0.0;
    double time_sum = 0.0;
    for (const auto& s : samples) {
        if (!s.ok) {
            ++row.failures;
            continue;
        }
        ++row.realizations;
        var_sum += s.variance;
        time_sum += s.runtime;
    }
    if (row.realizations > 0) {
        row.mean_variance = var_sum / row.realizations;
        row.mean_runtime_s = time_sum / row.realizations;
    } else {
        row.mean_variance = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

}  // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::SweepN: return "sweep-N";
    case ExperimentKind::SweepNoise: return "sweep-noise";
    case ExperimentKind::Consensus: return "consensus";
    case ExperimentKind::Selection: return "selection";
    case ExperimentKind::OracleGap: return "oracle-gap";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text)
{
    for (auto k : {ExperimentKind::SweepN, ExperimentKind::SweepNoise, ExperimentKind::Consensus,
                   ExperimentKind::Selection, ExperimentKind::OracleGap})
        if (to_string(k) == text)
            return k;
    throw Error(ErrorCode::ParseError, "unknown experiment kind '" + text + "'");
}

void ExperimentConfig::validate() const
{
    if (realizations < 1)
        throw Error(ErrorCode::InvalidConfig, "realizations must be at least 1");
    if (n_range.empty())
        throw Error(ErrorCode::InvalidConfig, "N range is empty");
    if (std::any_of(n_range.begin(), n_range.end(), [](int n) { return n < 1; }))
        throw Error(ErrorCode::InvalidConfig, "N values must be positive");
    if ((kind == ExperimentKind::SweepNoise || kind == ExperimentKind::Selection) &&
        noise_range.empty())
        throw Error(ErrorCode::InvalidConfig, "noise range is empty");
    if (std::any_of(noise_range.begin(), noise_range.end(), [](double v) { return !(v > 0.0); }))
        throw Error(ErrorCode::InvalidConfig, "noise grid values must be positive");
    if (num_antennas < 1)
        throw Error(ErrorCode::InvalidConfig, "need at least one antenna");
    if (methods.empty())
        throw Error(ErrorCode::InvalidConfig, "no methods selected");
    if (kind == ExperimentKind::Selection &&
        (selection_active < 1 || selection_active >= selection_sensors))
        throw Error(ErrorCode::InvalidConfig, "selection needs 1 <= K < N");
    if (quant_levels < 2)
        throw Error(ErrorCode::InvalidConfig, "quantized alphabet needs Q >= 2");
    noise.validate();
    optimizer.validate();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t group, std::uint64_t index)
{
    return splitmix64(splitmix64(splitmix64(master) ^ group) ^ index);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body)
{
    if (threads <= 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config)
{
    config.validate();
    const bool by_noise = config.kind == ExperimentKind::SweepNoise;
    std::vector<double> xs;
    if (by_noise)
        xs = config.noise_range;
    else
        xs.assign(config.n_range.begin(), config.n_range.end());

    std::vector<SweepRow> rows;
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        const int n = by_noise ? config.n_range.front() : static_cast<int>(xs[xi]);
        NoiseConfig noise = config.noise;
        if (by_noise)
            noise.noise_var = xs[xi];
        const std::size_t methods = config.methods.size();
        std::vector<std::vector<Sample>> samples(methods,
                                                 std::vector<Sample>(config.realizations));
        parallel_for(config.realizations, config.threads, [&](int r) {
            // common random numbers across the noise grid
            const std::uint64_t group = by_noise ? 0 : static_cast<std::uint64_t>(n);
            auto scenario = gen_centralized_scenario(n, config.num_antennas, noise,
                                                     cdouble(1.0, 0.0),
                                                     derive_seed(config.seed, group, r));
            const EstimationModel model = scenario.model();
            for (std::size_t m = 0; m < methods; ++m) {
                try {
                    auto outcome = run_method(config.methods[m], model, config);
                    samples[m][r] = Sample{true, outcome.variance, outcome.runtime};
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::InvalidConfig)
                        throw;
                    samples[m][r] = Sample{};
                }
            }
        });
        for (std::size_t m = 0; m < methods; ++m)
            rows.push_back(reduce(xs[xi], config.methods[m], samples[m]));
    }
    return rows;
}

std::pair<GainVector, double> baseline_all_ones(const EstimationModel& model)
{
    GainVector g{CVector::Ones(model.num_sensors()), PhaseOnly{}};
    return {g, global_variance(model, g.values)};
}

std::pair<GainVector, double> baseline_exhaustive_quantized(const EstimationModel& model,
                                                            int levels, double budget)
{
    const int n = model.num_sensors();
    if (levels < 2)
        throw Error(ErrorCode::InvalidConfig, "quantized alphabet needs Q >= 2");
    if (std::pow(static_cast<double>(levels), n) > budget)
        throw Error(ErrorCode::TooLarge, "enumeration of Q^N candidates exceeds the budget");

    std::vector<cdouble> alphabet(levels);
    for (int q = 0; q < levels; ++q)
        alphabet[q] = std::polar(1.0, 2.0 * std::numbers::pi * q / levels);

    std::vector<int> digits(n, 0);
    CVector a = CVector::Ones(n);
    CVector best = a;
    double best_var = global_variance(model, a);
    // odometer over digits 1..n-1; digit 0 stays at phase 0
    while (true) {
        int pos = 1;
        while (pos < n && digits[pos] == levels - 1) {
            digits[pos] = 0;
            a(pos) = alphabet[0];
            ++pos;
        }
        if (pos >= n)
            break;
        ++digits[pos];
        a(pos) = alphabet[digits[pos]];
        double v = global_variance(model, a);
        if (v < best_var) {
            best_var = v;
            best = a;
        }
    }
    return {GainVector{best, QuantizedPhase{levels}}, best_var};
}

std::pair<CVector, double> subset_energy_design(const EstimationModel& model,
                                               const std::vector<int>& support,
                                               const OptimizerConfig& config)
{
    const int n = model.num_sensors();
    const int k = static_cast<int>(support.size());
    if (k < 1)
        throw Error(ErrorCode::InvalidConfig, "empty sensor subset");
    const double modulus = std::sqrt(static_cast<double>(n) / k);

    // scaling the channel by the modulus is the same as scaling the gains
    EstimationModel sub;
    sub.channel.resize(model.num_rows(), k);
    sub.sensor_noise_var.resize(k);
    sub.noise_var = model.noise_var;
    for (int j = 0; j < k; ++j) {
        sub.channel.col(j) = modulus * model.channel.col(support[j]);
        sub.sensor_noise_var(j) = model.sensor_noise_var(support[j]);
    }
    auto [gains, trace] = optimize(sub, FixedEnergy{}, config);
    CVector a = CVector::Zero(n);
    for (int j = 0; j < k; ++j)
        a(support[j]) = modulus * gains.values(j);
    return {a, global_variance(model, a)};
}

std::pair<GainVector, double> baseline_selection(const EstimationModel& model, int active,
                                                 SelectionPolicy policy,
                                                 const OptimizerConfig& config)
{
    const int n = model.num_sensors();
    if (active < 1 || active >= n)
        throw Error(ErrorCode::InvalidConfig, "selection needs 1 <= K < N");
    const ConstraintSpec tag = SensorSelect{active, SensorSelect::Mode::Energy};

    if (policy == SelectionPolicy::MinSensorNoise) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return model.sensor_noise_var(a) < model.sensor_noise_var(b);
        });
        order.resize(active);
        std::sort(order.begin(), order.end());
        auto [a, var] = subset_energy_design(model, order, config);
        return {GainVector{a, tag}, var};
    }

    std::vector<int> chosen;
    std::vector<char> used(n, 0);
    CVector best_a;
    double best_var = 0.0;
    for (int step = 0; step < active; ++step) {
        int pick = -1;
        for (int cand = 0; cand < n; ++cand) {
            if (used[cand])
                continue;
            std::vector<int> trial = chosen;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), cand), cand);
            auto [a, var] = subset_energy_design(model, trial, config);
            if (pick < 0 || var < best_var) {
                pick = cand;
                best_var = var;
                best_a = a;
            }
        }
        used[pick] = 1;
        chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), pick), pick);
    }
    return {GainVector{best_a, tag}, best_var};
}

std::vector<SweepRow> run_selection_experiment(const ExperimentConfig& config)
{
    config.validate();
    const int n = config.selection_sensors;
    const int k = config.selection_active;
    const std::vector<std::string> methods{"proposed", "greedy", "min-sensor-noise", "all-N"};
    OptimizerConfig baseline_cfg = config.optimizer;
    baseline_cfg.restarts = 1;

    std::vector<SweepRow> rows;
    for (double sigma2 : config.noise_range) {
        NoiseConfig noise = config.noise;
        noise.noise_var = sigma2;
        std::vector<std::vector<Sample>> samples(methods.size(),
                                                 std::vector<Sample>(config.realizations));
        parallel_for(config.realizations, config.threads, [&](int r) {
            auto scenario = gen_centralized_scenario(n, config.num_antennas, noise,
                                                     cdouble(1.0, 0.0),
                                                     derive_seed(config.seed, 0, r));
            const EstimationModel model = scenario.model();
            auto timed = [&](auto&& fn) {
                const auto start = Clock::now();
                auto out = fn();
                double t = std::chrono::duration<double>(Clock::now() - start).count();
                return std::pair{out, config.record_timing ? t : 0.0};
            };
            try {
                auto [proposed, t0] = timed([&] {
                    return optimize(model, SensorSelect{k, SensorSelect::Mode::Energy},
                                    config.optimizer);
                });
                auto [greedy, t1] = timed([&] {
                    return baseline_selection(model, k, SelectionPolicy::Greedy, baseline_cfg);
                });
                auto [minnoise, t2] = timed([&] {
                    return baseline_selection(model, k, SelectionPolicy::MinSensorNoise,
                                              baseline_cfg);
                });
                // all-N reference, warm-started from the best K-sensor design so
                // that it can never lose to one of them
                auto [all, t3] = timed([&] {
                    CVector warm = proposed.first.values;
                    double warm_var = proposed.second.final_variance;
                    if (greedy.second < warm_var) {
                        warm = greedy.first.values;
                        warm_var = greedy.second;
                    }
                    if (minnoise.second < warm_var)
                        warm = minnoise.first.values;
                    double cold = optimize(model, FixedEnergy{}, config.optimizer)
                                      .second.final_variance;
                    double hot = optimize(model, FixedEnergy{}, baseline_cfg, warm)
                                     .second.final_variance;
                    return std::min(cold, hot);
                });
                samples[0][r] = Sample{true, proposed.second.final_variance, t0};
                samples[1][r] = Sample{true, greedy.second, t1};
                samples[2][r] = Sample{true, minnoise.second, t2};
                samples[3][r] = Sample{true, all, t3};
            } catch (const Error& e) {
                if (e.code() == ErrorCode::InvalidConfig)
                    throw;
            }
        });
        for (std::size_t m = 0; m < methods.size(); ++m)
            rows.push_back(reduce(sigma2, methods[m], samples[m]));
    }
    return rows;
}

std::vector<OracleGapRow> run_oracle_gap(const ExperimentConfig& config)
{
    config.validate();
    const ConstraintSpec constraint = QuantizedPhase{config.quant_levels};
    std::vector<OracleGapRow> rows;
    for (int n : config.n_range) {
        std::vector<double> gaps(config.realizations);
        parallel_for(config.realizations, config.threads, [&](int r) {
            OptimizerConfig cfg = config.optimizer;
            cfg.seed = derive_seed(config.seed, 1000 + n, r);
            auto scenario = gen_centralized_scenario(n, config.num_antennas, config.noise,
                                                     cdouble(1.0, 0.0),
                                                     derive_seed(config.seed, n, r));
            const EstimationModel model = scenario.model();
            double opt = optimize(model, constraint, cfg).second.final_variance;
            double best = baseline_exhaustive_quantized(model, config.quant_levels).second;
            gaps[r] = opt / best - 1.0;
        });
        OracleGapRow row;
        row.num_sensors = n;
        row.levels = config.quant_levels;
        row.seeds = config.realizations;
        int within = 0;
        double sum = 0.0;
        for (double g : gaps) {
            within += g <= 0.10;
            sum += g;
            row.max_gap = std::max(row.max_gap, g);
        }
        row.within_10pct = static_cast<double>(within) / config.realizations;
        row.mean_gap = sum / config.realizations;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ConsensusRow> run_consensus_experiment(const ExperimentConfig& config)
{
    config.validate();
    const int n = config.n_range.front();
    std::vector<ConsensusRow> rows(config.realizations);
    parallel_for(config.realizations, config.threads, [&](int g) {
        const std::uint64_t seed = derive_seed(config.seed, 77, g);
        Topology topo = random_connected_topology(n, config.edge_probability, seed);
        auto scenario =
            gen_decentralized_scenario(topo, config.noise, cdouble(10.0, 0.0), seed + 1);
        CVector gains = CVector::Ones(n);
        CompressionPlan plan;
        compressed_model(gains, scenario, &plan);
        std::mt19937_64 rng(seed + 2);
        Reception rec = simulate_reception(scenario, gains, rng);

        ConsensusRow row;
        row.graph = g;
        row.num_nodes = n;
        row.num_edges = static_cast<int>(topo.num_edges());
        ConsensusOptions opts;
        opts.rho = config.consensus_rho;
        opts.tol = config.consensus_tol;
        opts.max_iter = config.consensus_max_iter;
        EstimateReport report;
        try {
            report = run_consensus(scenario, gains, plan, rec, opts);
            row.iterations_to_tol = report.iterations_to_tol;
        } catch (const ConsensusNotConverged& e) {
            report = e.report();
        }
        for (int i = 0; i < n; ++i) {
            if (plan.retained_rows[i].empty())
                continue;
            auto local = local_mle(i, gains, scenario, rec.received[i], plan.retained_rows[i]);
            row.max_initial_local_error =
                std::max(row.max_initial_local_error,
                         std::abs(report.per_node_trace.front()[i] - local.theta) /
                             std::abs(local.theta));
        }
        rows[g] = row;
    });
    return rows;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& x_column,
                      bool with_runtime)
{
    std::ostringstream out;
    out << x_column << ",method,mean_variance";
    if (with_runtime)
        out << ",mean_runtime_s";
    out << ",realizations,failures\n";
    for (const auto& r : rows) {
        out << format_double(r.x) << ',' << r.method << ',' << format_double(r.mean_variance);
        if (with_runtime)
            out << ',' << format_double(r.mean_runtime_s);
        out << ',' << r.realizations << ',' << r.failures << '\n';
    }
    return out.str();
}

std::string oracle_gap_csv(const std::vector<OracleGapRow>& rows)
{
    std::ostringstream out;
    out << "N,Q,seeds,within_10pct,mean_gap,max_gap,reference\n";
    for (const auto& r : rows)
        out << r.num_sensors << ',' << r.levels << ',' << r.seeds << ','
            << format_double(r.within_10pct) << ',' << format_double(r.mean_gap) << ','
            << format_double(r.max_gap) << ",exhaustive-enumeration\n";
    return out.str();
}

std::string consensus_csv(const std::vector<ConsensusRow>& rows)
{
    std::ostringstream out;
    out << "graph,N,edges,iterations_to_tol,max_initial_local_error\n";
    for (const auto& r : rows)
        out << r.graph << ',' << r.num_nodes << ',' << r.num_edges << ',' << r.iterations_to_tol
            << ',' << format_double(r.max_initial_local_error) << '\n';
    return out.str();
}

}  // namespace wsngain
