// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "wsngain/error.hpp"
#include "wsngain/estimator.hpp"
#include "wsngain/gainopt.hpp"

using namespace wsngain;

namespace {

EstimationModel scalar_model(double v = 1.0, double n = 1.0)
{
    EstimationModel m;
    m.channel = CMatrix::Ones(1, 1);
    m.sensor_noise_var = RVector::Constant(1, v);
    m.noise_var = n;
    return m;
}

DecentralizedScenario unit_pair()
{
    auto s = gen_decentralized_scenario(build_topology(2, {{0, 1}}), NoiseConfig{}, 1.0, 1);
    s.link_gain = {{1.0}, {1.0}};
    s.sensor_noise_var.setOnes();
    s.comm_noise_var = 1.0;
    return s;
}

}  // namespace

TEST_CASE("scalar variance and estimate")
{
    auto m = scalar_model();
    CHECK(global_variance(m, CVector::Ones(1)) == doctest::Approx(2.0));
    CHECK(global_variance(m, CVector::Constant(1, 2.0)) == doctest::Approx(1.25));
    CVector y = CVector::Constant(1, 3.0);
    CHECK(std::abs(global_mle(m, CVector::Ones(1), y) - 3.0) < 1e-14);
    CHECK_THROWS_AS(global_variance(m, CVector::Zero(1)), Error);
    try {
        global_variance(m, CVector::Zero(1));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateGains);
    }
}

TEST_CASE("variance agrees with the dense oracle")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = gen_centralized_scenario(3 + seed % 9, 1 + seed % 5, NoiseConfig{}, 1.0, seed);
        std::mt19937_64 rng(seed);
        CVector a = random_feasible(FixedEnergy{}, s.num_sensors, rng);
        CHECK(global_variance(s.model(), a) ==
              doctest::Approx(oracle::variance(s.model(), a)).epsilon(1e-10));
    }
}

TEST_CASE("noiseless limit")
{
    auto s = gen_centralized_scenario(5, 3, NoiseConfig{}, cdouble(2.0, -1.0), 4);
    auto m = s.model();
    m.sensor_noise_var.setConstant(1e-18);
    m.noise_var = 1e-18;
    CVector a = CVector::Ones(5);
    std::mt19937_64 rng(1);
    CVector y = simulate_measurement(m, a, s.theta, rng);
    CHECK((y - m.channel * a * s.theta).norm() < 1e-6);
    CHECK(std::abs(global_mle(m, a, y) - s.theta) < 1e-6);
}

TEST_CASE("measurement variance and unbiasedness")
{
    auto m = scalar_model(1.0, 1.0);
    std::mt19937_64 rng(7);
    const int draws = 100000;
    cdouble mean = 0.0;
    double second = 0.0;
    for (int k = 0; k < draws; ++k) {
        cdouble y = simulate_measurement(m, CVector::Ones(1), 1.0, rng)(0);
        mean += y;
        second += std::norm(y - 1.0);
    }
    mean /= draws;
    CHECK(second / draws == doctest::Approx(2.0).epsilon(0.03));
    CHECK(std::abs(mean - 1.0) < 4.0 * std::sqrt(2.0 / draws));

    auto s = gen_centralized_scenario(6, 2, NoiseConfig{}, cdouble(1.0, 1.0), 8);
    CVector a = CVector::Ones(6);
    const double sd = std::sqrt(global_variance(s.model(), a) / draws);
    cdouble est = 0.0;
    for (int k = 0; k < draws; ++k)
        est += global_mle(s.model(), a, simulate_measurement(s, a, rng));
    est /= draws;
    CHECK(std::abs(est - s.theta) < 4.0 * sd);
}

TEST_CASE("estimator is linear in the observation")
{
    auto s = gen_centralized_scenario(4, 2, NoiseConfig{}, 1.0, 2);
    std::mt19937_64 rng(3);
    CVector a = random_feasible(PhaseOnly{}, 4, rng);
    CVector y = simulate_measurement(s, a, rng);
    const cdouble alpha(0.3, -2.0);
    CHECK(std::abs(global_mle(s.model(), a, alpha * y) - alpha * global_mle(s.model(), a, y)) <
          1e-12);
}

TEST_CASE("decentralized observation length")
{
    auto s = unit_pair();
    CompressionPlan plan;
    compressed_model(CVector::Ones(2), s, &plan);
    std::mt19937_64 rng(1);
    CHECK(simulate_measurement(s, CVector::Ones(2), plan, rng).size() == 2);
}

TEST_CASE("local estimates")
{
    auto s = unit_pair();
    const cdouble five[] = {5.0};
    auto e = local_mle(0, CVector::Ones(2), s, five);
    CHECK(std::abs(e.theta - 5.0) < 1e-14);
    CHECK(e.variance == doctest::Approx(2.0));
    CHECK(e.variance == doctest::Approx(1.0 / information_value(0, CVector::Ones(2), s)));

    auto star = gen_decentralized_scenario(build_topology(3, {{0, 1}, {0, 2}}), NoiseConfig{},
                                           1.0, 1);
    star.link_gain = {{1.0, 1.0}, {1.0}, {1.0}};
    star.sensor_noise_var.setOnes();
    star.comm_noise_var = 1.0;
    const cdouble ys[] = {4.0, 6.0};
    auto e2 = local_mle(0, CVector::Ones(3), star, ys);
    CHECK(std::abs(e2.theta - 5.0) < 1e-14);
    CHECK(e2.variance == doctest::Approx(1.0));
}

TEST_CASE("ADMM step")
{
    auto pair = build_topology(2, {{0, 1}});
    RVector c = RVector::Constant(2, 3.5);
    auto st = admm_step(admm_init(c, 1.0), pair, c);
    CHECK((st.y - c).norm() < 1e-15);
    CHECK(st.lambda.norm() < 1e-15);
    CHECK(st.iteration == 1);

    // y_i <- (rho d y_i + rho sum y_j - lambda_i + x_i) / (1 + 2 rho d)
    RVector x(2);
    x << 0.0, 2.0;
    auto s1 = admm_step(admm_init(x, 1.0), pair, x);
    CHECK(s1.y(0) == doctest::Approx(2.0 / 3.0));
    CHECK(s1.y(1) == doctest::Approx(4.0 / 3.0));
    CHECK(s1.lambda(0) == doctest::Approx(-2.0 / 3.0));
    CHECK(s1.lambda(1) == doctest::Approx(2.0 / 3.0));

    auto s = admm_init(x, 1.0);
    for (int k = 0; k < 200; ++k)
        s = admm_step(s, pair, x);
    CHECK(std::abs(s.y(0) - 1.0) < 1e-8);
    CHECK(std::abs(s.y(1) - 1.0) < 1e-8);
}

TEST_CASE("ADMM fixed point on a larger graph")
{
    auto t = random_connected_topology(9, 0.4, 2);
    RVector x = RVector::LinSpaced(9, -1.0, 3.0);
    auto s = admm_init(x, 0.7);
    for (int k = 0; k < 2000; ++k)
        s = admm_step(s, t, x);
    auto next = admm_step(s, t, x);
    CHECK((next.y - s.y).norm() < 1e-9);
    CHECK((next.lambda - s.lambda).norm() < 1e-9);
    CHECK(std::abs(s.y(0) - x.mean()) < 1e-9);
}

TEST_CASE("consensus on two nodes reaches the global MLE")
{
    auto s = gen_decentralized_scenario(build_topology(2, {{0, 1}}), NoiseConfig{}, 1.0, 5);
    CVector a = CVector::Ones(2);
    CompressionPlan plan;
    auto g = compressed_model(a, s, &plan);
    std::mt19937_64 rng(2);
    auto rec = simulate_reception(s, a, rng);
    ConsensusOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 2000;
    auto rep = run_consensus(s, a, plan, rec, opts);
    const cdouble target = global_mle(g.model, a, gather_observation(plan, s, rec));
    CHECK(std::abs(rep.theta_hat - target) < 1e-10);
    for (cdouble v : rep.per_node_trace.back())
        CHECK(std::abs(v - target) < 1e-10 * std::abs(target) + 1e-12);
    CHECK(rep.analytic_variance == doctest::Approx(global_variance(g.model, a)));
}

TEST_CASE("identical nodes need no iterations")
{
    auto s = unit_pair();
    CVector a = CVector::Ones(2);
    CompressionPlan plan;
    compressed_model(a, s, &plan);
    Reception rec{{{3.0}, {3.0}}};
    auto rep = run_consensus(s, a, plan, rec);
    CHECK(rep.iterations_to_tol == 0);
    CHECK(std::abs(rep.per_node_trace.front()[0] - 3.0) < 1e-14);
}

TEST_CASE("consensus variance decomposition and tail behaviour")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto t = random_connected_topology(16, 0.3, seed);
        auto s = gen_decentralized_scenario(t, NoiseConfig{}, 10.0, seed);
        CVector a = CVector::Ones(16);
        CompressionPlan plan;
        auto g = compressed_model(a, s, &plan);
        double info = 0.0;
        for (int i = 0; i < 16; ++i)
            info += local_information(i, a, s, plan.retained_rows[i]);
        CHECK(global_variance(g.model, a) == doctest::Approx(1.0 / info).epsilon(1e-10));

        std::mt19937_64 rng(seed);
        auto rec = simulate_reception(s, a, rng);
        ConsensusOptions opts;
        opts.tol = 1e-13;
        opts.max_iter = 400;
        EstimateReport rep;
        try {
            rep = run_consensus(s, a, plan, rec, opts);
        } catch (const ConsensusNotConverged& e) {
            rep = e.report();
        }
        // error envelope shrinks over the tail half
        const std::size_t len = rep.per_node_trace.size();
        auto err = [&](std::size_t k) {
            double e = 0.0;
            for (cdouble v : rep.per_node_trace[k])
                e = std::max(e, std::abs(v - rep.theta_hat));
            return e;
        };
        const std::size_t half = len / 2, quarter = len / 4;
        double early = 0.0, late = 0.0;
        for (std::size_t k = half; k < half + quarter; ++k)
            early = std::max(early, err(k));
        for (std::size_t k = half + quarter; k < len; ++k)
            late = std::max(late, err(k));
        CHECK(late <= early);
        CHECK(err(len - 1) < err(1));
    }
}

TEST_CASE("trailing-difference stop rule")
{
    auto t = random_connected_topology(10, 0.4, 3);
    auto s = gen_decentralized_scenario(t, NoiseConfig{}, 10.0, 3);
    CVector a = CVector::Ones(10);
    CompressionPlan plan;
    compressed_model(a, s, &plan);
    std::mt19937_64 rng(4);
    auto rec = simulate_reception(s, a, rng);
    ConsensusOptions opts;
    opts.stop = StopRule::TrailingDifference;
    opts.tol = 1e-9;
    auto rep = run_consensus(s, a, plan, rec, opts);
    CHECK(rep.iterations_to_tol > 0);
    for (cdouble v : rep.per_node_trace.back())
        CHECK(std::abs(v - rep.theta_hat) < 1e-6 * std::abs(rep.theta_hat));

    opts.stop = StopRule::KnownTarget;
    opts.max_iter = 2;
    CHECK_THROWS_AS(run_consensus(s, a, plan, rec, opts), ConsensusNotConverged);
}
