// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wsngain/gainopt.hpp"
#include "wsngain/gains.hpp"
#include "wsngain/scenario.hpp"

namespace wsngain {

enum class ExperimentKind { SweepN, SweepNoise, Consensus, Selection, OracleGap };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SweepN;
    std::vector<int> n_range{10, 30, 60};
    std::vector<double> noise_range{0.01, 0.1, 1.0, 10.0};  // sigma_n^2 grid
    int num_antennas = 4;
    int realizations = 300;
    ConstraintSpec constraint = PhaseOnly{};
    /// Any of "opt" (cyclic optimizer), "uqp" (phase-only fast path), "all-ones".
    std::vector<std::string> methods{"opt", "all-ones"};
    OptimizerConfig optimizer;
    NoiseConfig noise;
    std::uint64_t seed = 1;
    int threads = 0;             // 0: hardware concurrency
    bool record_timing = true;   // false writes 0 runtimes for byte-identical output
    int selection_sensors = 35;
    int selection_active = 10;
    int quant_levels = 4;        // oracle-gap alphabet size
    double edge_probability = 0.3;
    double consensus_rho = 1.0;
    double consensus_tol = 1e-6;
    int consensus_max_iter = 500;

    void validate() const;
};

/// Per-(master seed, group, realization) RNG seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t group, std::uint64_t index);

/// Runs body(i) for i in [0, count) on `threads` workers (0: hardware).
void parallel_for(int count, int threads, const std::function<void(int)>& body);

struct SweepRow {
    double x = 0.0;  // N for sweep-N, sigma_n^2 for sweep-noise/selection
    std::string method;
    double mean_variance = 0.0;
    double mean_runtime_s = 0.0;
    int realizations = 0;  // successful realizations
    int failures = 0;
};

/// sweep-N or sweep-noise: one row per (x, method), methods in config order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

/// Selection experiment: rows for "proposed", "greedy", "min-sensor-noise"
/// and "all-N" at every sigma_n^2 of the grid.
std::vector<SweepRow> run_selection_experiment(const ExperimentConfig& config);

struct OracleGapRow {
    int num_sensors = 0;
    int levels = 0;
    int seeds = 0;
    double within_10pct = 0.0;  // fraction of seeds with var_opt <= 1.1 var_exhaustive
    double mean_gap = 0.0;      // mean of var_opt / var_exhaustive - 1
    double max_gap = 0.0;
};

std::vector<OracleGapRow> run_oracle_gap(const ExperimentConfig& config);

struct ConsensusRow {
    int graph = 0;
    int num_nodes = 0;
    int num_edges = 0;
    int iterations_to_tol = -1;  // -1: not reached within max_iter
    double max_initial_local_error = 0.0;
};

/// Consensus runs on `realizations` random connected graphs of n_range[0]
/// nodes with theta = 10.
std::vector<ConsensusRow> run_consensus_experiment(const ExperimentConfig& config);

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& x_column,
                      bool with_runtime = true);
std::string oracle_gap_csv(const std::vector<OracleGapRow>& rows);
std::string consensus_csv(const std::vector<ConsensusRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// No feedback: a = 1.
std::pair<GainVector, double> baseline_all_ones(const EstimationModel& model);

/// Global optimum over the Q-ary phase alphabet by enumeration (the first
/// gain is pinned to 1 since a global phase does not change the variance).
/// Throws TooLarge when Q^N exceeds `budget`.
std::pair<GainVector, double> baseline_exhaustive_quantized(const EstimationModel& model,
                                                            int levels, double budget = 1e7);

enum class SelectionPolicy { Greedy, MinSensorNoise };

/// Picks K sensors and optimizes fixed-energy gains (total energy N) on them.
/// Greedy adds the sensor that lowers the variance most; min-sensor-noise
/// takes the K smallest sigma_v^2. Both are reimplemented by interpretation.
std::pair<GainVector, double> baseline_selection(const EstimationModel& model, int active,
                                                 SelectionPolicy policy,
                                                 const OptimizerConfig& config = {});

/// Fixed-energy design restricted to the sensors in `support` (zero gain
/// elsewhere, ||a||^2 = N); returns the full-length gains and the variance.
std::pair<CVector, double> subset_energy_design(const EstimationModel& model,
                                               const std::vector<int>& support,
                                               const OptimizerConfig& config = {});

}  // namespace wsngain
