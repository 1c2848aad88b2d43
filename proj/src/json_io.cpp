// SPDX-License-Identifier: Apache-2.0
#include "wsngain/json_io.hpp"

#include <algorithm>
#include <initializer_list>
#include <tuple>

#include "wsngain/error.hpp"

namespace wsngain {

namespace {

Json complex_json(cdouble z) { return Json::array({z.real(), z.imag()}); }

template <class T>
T field(const Json& j, const char* key)
{
    if (!j.contains(key))
        throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad field '") + key + "': " + e.what());
    }
}

cdouble complex_from(const Json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorCode::ParseError, std::string(what) + " must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

void write_common(Json& j, const RVector& sensor_noise_var, cdouble theta, std::uint64_t seed,
                  const NoiseConfig& config)
{
    j["theta"] = complex_json(theta);
    j["sensor_noise_var"] = std::vector<double>(sensor_noise_var.begin(), sensor_noise_var.end());
    j["seed"] = seed;
    j["alpha"] = config.alpha;
    j["d_range"] = {config.d_min, config.d_max};
    j["v_range"] = {config.v_min, config.v_max};
}

void read_common(const Json& j, int n, RVector& sensor_noise_var, cdouble& theta,
                 std::uint64_t& seed, NoiseConfig& config)
{
    theta = complex_from(field<Json>(j, "theta"), "theta");
    auto v = field<std::vector<double>>(j, "sensor_noise_var");
    if (static_cast<int>(v.size()) != n)
        throw Error(ErrorCode::ParseError, "sensor_noise_var must have N entries");
    sensor_noise_var = Eigen::Map<RVector>(v.data(), n);
    seed = j.contains("seed") ? field<std::uint64_t>(j, "seed") : 0;
    if (j.contains("alpha"))
        config.alpha = field<double>(j, "alpha");
    if (j.contains("d_range")) {
        auto r = field<std::vector<double>>(j, "d_range");
        if (r.size() != 2)
            throw Error(ErrorCode::ParseError, "d_range must be [min, max]");
        config.d_min = r[0];
        config.d_max = r[1];
    }
    if (j.contains("v_range")) {
        auto r = field<std::vector<double>>(j, "v_range");
        if (r.size() != 2)
            throw Error(ErrorCode::ParseError, "v_range must be [min, max]");
        config.v_min = r[0];
        config.v_max = r[1];
    }
}

}  // namespace

Json to_json(const CentralizedScenario& s)
{
    Json j;
    j["kind"] = "centralized";
    j["N"] = s.num_sensors;
    j["M"] = s.num_antennas;
    Json h = Json::array();
    for (int r = 0; r < s.channel.rows(); ++r)
        for (int c = 0; c < s.channel.cols(); ++c)
            h.push_back(complex_json(s.channel(r, c)));
    j["H"] = std::move(h);
    j["fc_noise_var"] = s.fc_noise_var;
    write_common(j, s.sensor_noise_var, s.theta, s.seed, s.config);
    return j;
}

Json to_json(const DecentralizedScenario& s)
{
    Json j;
    j["kind"] = "decentralized";
    j["N"] = s.num_nodes();
    Json edges = Json::array();
    for (auto [a, b] : s.topology.edges())
        edges.push_back({a + 1, b + 1});
    j["edges"] = std::move(edges);
    Json links = Json::array();
    for (int rx = 0; rx < s.num_nodes(); ++rx) {
        auto nbrs = s.topology.neighbors(rx);
        for (std::size_t slot = 0; slot < nbrs.size(); ++slot)
            links.push_back({{"rx", rx + 1}, {"tx", nbrs[slot] + 1},
                             {"gain", complex_json(s.link_gain[rx][slot])}});
    }
    j["links"] = std::move(links);
    j["comm_noise_var"] = s.comm_noise_var;
    write_common(j, s.sensor_noise_var, s.theta, s.seed, s.config);
    return j;
}

Json to_json(const AnyScenario& scenario)
{
    return std::visit([](const auto& s) { return to_json(s); }, scenario);
}

AnyScenario scenario_from_json(const Json& j)
{
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, "scenario must be a JSON object");
    const auto kind = field<std::string>(j, "kind");
    const int n = field<int>(j, "N");
    if (n < 1)
        throw Error(ErrorCode::ParseError, "N must be positive");

    if (kind == "centralized") {
        CentralizedScenario s;
        s.num_sensors = n;
        s.num_antennas = field<int>(j, "M");
        if (s.num_antennas < 1)
            throw Error(ErrorCode::ParseError, "M must be positive");
        const Json h = field<Json>(j, "H");
        if (!h.is_array() || h.size() != static_cast<std::size_t>(n) * s.num_antennas)
            throw Error(ErrorCode::ParseError, "H must hold M*N entries");
        s.channel.resize(s.num_antennas, n);
        for (int r = 0; r < s.num_antennas; ++r)
            for (int c = 0; c < n; ++c)
                s.channel(r, c) = complex_from(h[r * n + c], "H entry");
        s.fc_noise_var = field<double>(j, "fc_noise_var");
        read_common(j, n, s.sensor_noise_var, s.theta, s.seed, s.config);
        s.config.noise_var = s.fc_noise_var;
        s.validate();
        return s;
    }
    if (kind == "decentralized") {
        DecentralizedScenario s;
        std::vector<Edge> edges;
        for (const auto& e : field<Json>(j, "edges")) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                throw Error(ErrorCode::ParseError, "edges must be [i, j] pairs");
            edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
        }
        s.topology = build_topology(n, edges);
        s.link_gain.resize(n);
        std::vector<std::vector<char>> seen(n);
        for (int i = 0; i < n; ++i) {
            s.link_gain[i].assign(s.topology.degree(i), cdouble{});
            seen[i].assign(s.topology.degree(i), 0);
        }
        for (const auto& link : field<Json>(j, "links")) {
            const int rx = field<int>(link, "rx") - 1;
            const int tx = field<int>(link, "tx") - 1;
            if (rx < 0 || rx >= n || tx < 0 || tx >= n)
                throw Error(ErrorCode::ParseError, "link endpoint out of range");
            const int slot = s.topology.neighbor_slot(rx, tx);
            if (slot < 0)
                throw Error(ErrorCode::InconsistentPlan, "link between non-adjacent nodes");
            s.link_gain[rx][slot] = complex_from(field<Json>(link, "gain"), "link gain");
            seen[rx][slot] = 1;
        }
        for (const auto& row : seen)
            if (std::find(row.begin(), row.end(), 0) != row.end())
                throw Error(ErrorCode::ParseError, "every directed link needs a gain");
        s.comm_noise_var = field<double>(j, "comm_noise_var");
        read_common(j, n, s.sensor_noise_var, s.theta, s.seed, s.config);
        s.config.noise_var = s.comm_noise_var;
        s.validate();
        return s;
    }
    throw Error(ErrorCode::ParseError, "unknown scenario kind '" + kind + "'");
}

Json plan_to_json(const CompressionPlan& plan)
{
    std::vector<int> carrier(plan.carrier);
    for (int& c : carrier)
        ++c;
    return {{"carrier", carrier}, {"r", plan.discarded}, {"m_dim", plan.m_dim}};
}

Json result_to_json(const GainVector& gains, const OptimizerTrace& trace)
{
    Json g = Json::array();
    for (int i = 0; i < gains.size(); ++i)
        g.push_back(complex_json(gains.values(i)));
    return {{"gains", std::move(g)},
            {"constraint", to_string(gains.constraint)},
            {"variance", trace.final_variance},
            {"eta_trace", trace.eta_per_outer},
            {"outer_iters", trace.outer_iters},
            {"inner_iters_total", trace.inner_iters_total},
            {"wall_time_s", trace.wall_time_s}};
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* what)
{
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
    for (const auto& item : j.items())
        if (std::none_of(keys.begin(), keys.end(),
                         [&](const char* k) { return item.key() == k; }))
            throw Error(ErrorCode::ParseError,
                        std::string("unknown ") + what + " key '" + item.key() + "'");
}

template <class T>
void maybe(const Json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = field<T>(j, key);
}

}  // namespace

NoiseConfig noise_config_from_json(const Json& j, NoiseConfig base)
{
    reject_unknown(j, {"alpha", "d_range", "v_range", "noise_var"}, "noise");
    maybe(j, "alpha", base.alpha);
    maybe(j, "noise_var", base.noise_var);
    for (auto [key, lo, hi] : {std::tuple{"d_range", &base.d_min, &base.d_max},
                               std::tuple{"v_range", &base.v_min, &base.v_max}}) {
        if (!j.contains(key))
            continue;
        auto r = field<std::vector<double>>(j, key);
        if (r.size() != 2)
            throw Error(ErrorCode::ParseError, std::string(key) + " must be [min, max]");
        *lo = r[0];
        *hi = r[1];
    }
    base.validate();
    return base;
}

OptimizerConfig optimizer_config_from_json(const Json& j, OptimizerConfig base)
{
    reject_unknown(j,
                   {"eta0_margin", "lambda_margin", "inner_iters", "outer_tol", "max_outer",
                    "restarts", "seed"},
                   "optimizer");
    maybe(j, "eta0_margin", base.eta0_margin);
    maybe(j, "lambda_margin", base.lambda_margin);
    maybe(j, "inner_iters", base.inner_iters);
    maybe(j, "outer_tol", base.outer_tol);
    maybe(j, "max_outer", base.max_outer);
    maybe(j, "restarts", base.restarts);
    maybe(j, "seed", base.seed);
    base.validate();
    return base;
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base)
{
    reject_unknown(j,
                   {"kind", "n_range", "noise_range", "M", "realizations", "constraint",
                    "methods", "optimizer", "noise", "seed", "threads", "record_timing",
                    "selection_N", "selection_K", "Q", "edge_probability", "rho", "tol",
                    "max_iter"},
                   "experiment");
    if (j.contains("kind"))
        base.kind = parse_experiment_kind(field<std::string>(j, "kind"));
    maybe(j, "n_range", base.n_range);
    maybe(j, "noise_range", base.noise_range);
    maybe(j, "M", base.num_antennas);
    maybe(j, "realizations", base.realizations);
    if (j.contains("constraint"))
        base.constraint = parse_constraint(field<std::string>(j, "constraint"));
    maybe(j, "methods", base.methods);
    if (j.contains("optimizer"))
        base.optimizer = optimizer_config_from_json(j.at("optimizer"), base.optimizer);
    if (j.contains("noise"))
        base.noise = noise_config_from_json(j.at("noise"), base.noise);
    maybe(j, "seed", base.seed);
    maybe(j, "threads", base.threads);
    maybe(j, "record_timing", base.record_timing);
    maybe(j, "selection_N", base.selection_sensors);
    maybe(j, "selection_K", base.selection_active);
    maybe(j, "Q", base.quant_levels);
    maybe(j, "edge_probability", base.edge_probability);
    maybe(j, "rho", base.consensus_rho);
    maybe(j, "tol", base.consensus_tol);
    maybe(j, "max_iter", base.consensus_max_iter);
    return base;
}

Json parse_json_text(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace wsngain
