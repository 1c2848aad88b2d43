// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "wsngain/diffusion.hpp"
#include "wsngain/error.hpp"
#include "wsngain/estimator.hpp"
#include "wsngain/gainopt.hpp"
#include "wsngain/harness.hpp"
#include "wsngain/json_io.hpp"

using namespace wsngain;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::InvalidConfig, "cannot write '" + out_path + "'");
    out << text;
}

Json load_json(const std::string& path) { return parse_json_text(read_file(path)); }

CVector gains_from_result(const Json& j, int n)
{
    const Json& g = j.contains("gains") ? j.at("gains") : j;
    if (!g.is_array() || static_cast<int>(g.size()) != n)
        throw Error(ErrorCode::ParseError, "gain vector must have N entries");
    CVector a(n);
    for (int i = 0; i < n; ++i) {
        if (!g[i].is_array() || g[i].size() != 2)
            throw Error(ErrorCode::ParseError, "gains must be [re, im] pairs");
        a(i) = cdouble(g[i][0].get<double>(), g[i][1].get<double>());
    }
    return a;
}

struct Common {
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string out;
    std::string config;
    std::string constraint;
    int realizations = 0;
    double rho = 0.0;
    std::string dump_plan;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "Master RNG seed");
    app->add_option("--out", c.out, "Output path (stdout if omitted)");
    app->add_option("--config", c.config, "JSON configuration file");
    app->add_option("--constraint", c.constraint, "energy | phase | quant:Q | select:K[:phase]");
    app->add_option("--realizations", c.realizations, "Monte Carlo realizations");
    app->add_option("--rho", c.rho, "ADMM penalty");
    app->add_option("--dump-plan", c.dump_plan, "Write the compression plan JSON here");
}

ExperimentConfig experiment_config(const Common& c, CLI::App* app, ExperimentConfig base)
{
    if (!c.config.empty())
        base = experiment_config_from_json(load_json(c.config), base);
    if (app->count("--seed"))
        base.seed = c.seed;
    if (app->count("--realizations"))
        base.realizations = c.realizations;
    if (app->count("--constraint"))
        base.constraint = parse_constraint(c.constraint);
    if (app->count("--rho"))
        base.consensus_rho = c.rho;
    base.validate();
    return base;
}

void write_error(std::string_view code, const std::string& message)
{
    std::cerr << Json{{"error", std::string(code)}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sensor gain design and estimation over wireless sensor networks"};
    app.require_subcommand(1);

    Common gen_c, opt_c, cons_c, sweep_c, sel_c, gap_c;

    auto* gen = app.add_subcommand("gen-scenario", "Draw a random scenario");
    add_common(gen, gen_c);
    std::string kind = "centralized";
    int n = 10, m = 4;
    double edge_prob = 0.3;
    std::vector<double> theta{1.0, 0.0};
    gen->add_option("--kind", kind, "centralized | decentralized")
        ->check(CLI::IsMember({"centralized", "decentralized"}));
    gen->add_option("-N,--sensors", n, "Number of sensors / nodes");
    gen->add_option("-M,--antennas", m, "FC antennas (centralized)");
    gen->add_option("--edge-prob", edge_prob, "Edge probability (decentralized)");
    gen->add_option("--theta", theta, "Parameter as re im")->expected(2);

    auto* opt = app.add_subcommand("optimize", "Optimize the gains of a scenario");
    add_common(opt, opt_c);
    std::string scenario_path, method = "cyclic";
    int restarts = 0;
    bool no_refresh = false;
    opt->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    opt->add_option("--method", method, "cyclic | uqp")->check(CLI::IsMember({"cyclic", "uqp"}));
    opt->add_option("--restarts", restarts, "Number of restarts");
    opt->add_flag("--no-refresh", no_refresh, "Keep the initial compression plan");

    auto* cons = app.add_subcommand("simulate-consensus", "Run ADMM consensus, emit a CSV trace");
    add_common(cons, cons_c);
    std::string cons_scenario, gains_path;
    int max_iter = 500;
    double tol = 1e-6;
    cons->add_option("--scenario", cons_scenario, "Decentralized scenario JSON")->required();
    cons->add_option("--gains", gains_path, "Optimizer result JSON (all ones if omitted)");
    cons->add_option("--max-iter", max_iter, "Iteration cap");
    cons->add_option("--tol", tol, "Relative tolerance");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over N, sigma_n^2 or graphs");
    add_common(sweep, sweep_c);
    std::string sweep_kind;
    sweep->add_option("--kind", sweep_kind, "sweep-N | sweep-noise | consensus")
        ->check(CLI::IsMember({"sweep-N", "sweep-noise", "consensus"}));

    auto* sel = app.add_subcommand("select", "Sensor-selection experiment");
    add_common(sel, sel_c);

    auto* gap = app.add_subcommand("oracle-gap", "Quantized optimizer vs exhaustive search");
    add_common(gap, gap_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        write_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*gen) {
            NoiseConfig noise;
            if (!gen_c.config.empty())
                noise = noise_config_from_json(load_json(gen_c.config));
            const cdouble th(theta[0], theta[1]);
            Json j;
            if (kind == "centralized") {
                j = to_json(gen_centralized_scenario(n, m, noise, th, gen_c.seed));
            } else {
                auto topo = random_connected_topology(n, edge_prob, gen_c.seed);
                j = to_json(gen_decentralized_scenario(topo, noise, th, gen_c.seed + 1));
            }
            emit(j.dump(2) + "\n", gen_c.out);
        } else if (*opt) {
            auto scenario = scenario_from_json(load_json(scenario_path));
            OptimizerConfig cfg;
            if (!opt_c.config.empty())
                cfg = optimizer_config_from_json(load_json(opt_c.config));
            if (opt->count("--seed"))
                cfg.seed = opt_c.seed;
            if (opt->count("--restarts"))
                cfg.restarts = restarts;
            cfg.validate();
            ConstraintSpec constraint = PhaseOnly{};
            if (opt->count("--constraint"))
                constraint = parse_constraint(opt_c.constraint);

            std::pair<GainVector, OptimizerTrace> result;
            if (auto* c = std::get_if<CentralizedScenario>(&scenario)) {
                if (method == "uqp")
                    result = optimize_phase_only_uqp(c->model(), cfg);
                else
                    result = optimize(c->model(), constraint, cfg);
                if (!opt_c.dump_plan.empty())
                    throw Error(ErrorCode::InvalidConfig,
                                "--dump-plan needs a decentralized scenario");
            } else {
                auto& d = std::get<DecentralizedScenario>(scenario);
                if (method == "uqp")
                    throw Error(ErrorCode::InvalidConfig,
                                "the uqp method needs a centralized scenario");
                result = optimize_decentralized(d, constraint, cfg, !no_refresh);
                if (!opt_c.dump_plan.empty()) {
                    CompressionPlan plan;
                    compressed_model(result.first.values, d, &plan);
                    emit(plan_to_json(plan).dump(2) + "\n", opt_c.dump_plan);
                }
            }
            emit(result_to_json(result.first, result.second).dump(2) + "\n", opt_c.out);
        } else if (*cons) {
            auto scenario = scenario_from_json(load_json(cons_scenario));
            auto* d = std::get_if<DecentralizedScenario>(&scenario);
            if (!d)
                throw Error(ErrorCode::InvalidConfig, "consensus needs a decentralized scenario");
            CVector gains = gains_path.empty() ? CVector::Ones(d->num_nodes())
                                               : gains_from_result(load_json(gains_path),
                                                                   d->num_nodes());
            CompressionPlan plan;
            compressed_model(gains, *d, &plan);
            if (!cons_c.dump_plan.empty())
                emit(plan_to_json(plan).dump(2) + "\n", cons_c.dump_plan);
            std::mt19937_64 rng(cons_c.seed);
            Reception rec = simulate_reception(*d, gains, rng);
            ConsensusOptions opts;
            opts.max_iter = max_iter;
            opts.tol = tol;
            if (cons->count("--rho"))
                opts.rho = cons_c.rho;
            EstimateReport report;
            int status = 0;
            try {
                report = run_consensus(*d, gains, plan, rec, opts);
            } catch (const ConsensusNotConverged& e) {
                report = e.report();
                status = 3;
            }
            std::ostringstream csv;
            csv << "iter,node,theta_hat_re,theta_hat_im,abs_err\n";
            for (std::size_t k = 0; k < report.per_node_trace.size(); ++k)
                for (int i = 0; i < d->num_nodes(); ++i) {
                    const cdouble v = report.per_node_trace[k][i];
                    csv << k << ',' << i + 1 << ',' << format_double(v.real()) << ','
                        << format_double(v.imag()) << ','
                        << format_double(std::abs(v - report.theta_hat)) << '\n';
                }
            emit(csv.str(), cons_c.out);
            if (status != 0) {
                write_error(to_string(ErrorCode::NoConvergence),
                            "consensus did not reach tolerance");
                return status;
            }
        } else if (*sweep) {
            ExperimentConfig base;
            if (!sweep_kind.empty())
                base.kind = parse_experiment_kind(sweep_kind);
            auto cfg = experiment_config(sweep_c, sweep, base);
            if (!sweep_kind.empty())
                cfg.kind = parse_experiment_kind(sweep_kind);
            std::string text;
            if (cfg.kind == ExperimentKind::Consensus) {
                text = consensus_csv(run_consensus_experiment(cfg));
            } else if (cfg.kind == ExperimentKind::SweepN || cfg.kind == ExperimentKind::SweepNoise) {
                text = sweep_csv(run_sweep(cfg),
                                 cfg.kind == ExperimentKind::SweepN ? "N" : "sigma_n2");
            } else {
                throw Error(ErrorCode::InvalidConfig,
                            "sweep runs sweep-N, sweep-noise or consensus experiments");
            }
            emit(text, sweep_c.out);
        } else if (*sel) {
            ExperimentConfig base;
            base.kind = ExperimentKind::Selection;
            auto cfg = experiment_config(sel_c, sel, base);
            cfg.kind = ExperimentKind::Selection;
            emit(sweep_csv(run_selection_experiment(cfg), "sigma_n2"), sel_c.out);
            std::cerr << "note: greedy and min-sensor-noise baselines are reimplemented by "
                         "interpretation\n";
        } else if (*gap) {
            ExperimentConfig base;
            base.kind = ExperimentKind::OracleGap;
            base.n_range = {2, 3, 4};
            base.realizations = 100;
            base.optimizer.restarts = 10;
            auto cfg = experiment_config(gap_c, gap, base);
            cfg.kind = ExperimentKind::OracleGap;
            emit(oracle_gap_csv(run_oracle_gap(cfg)), gap_c.out);
        }
    } catch (const Error& e) {
        write_error(to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        write_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
