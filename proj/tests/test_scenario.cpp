// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "wsngain/error.hpp"
#include "wsngain/json_io.hpp"
#include "wsngain/scenario.hpp"

using namespace wsngain;

TEST_CASE("channel coefficient modulus")
{
    std::mt19937_64 rng(1);
    CHECK(std::abs(gen_channel_coefficient(rng, 2.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(gen_channel_coefficient(rng, 1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(gen_channel_coefficient(rng, 4.0, 2.0)) ==
          doctest::Approx(1.0 / 16).epsilon(1e-15));
}

TEST_CASE("channel phases look uniform")
{
    // Kolmogorov-Smirnov statistic against U[0, 2 pi)
    std::mt19937_64 rng(5);
    std::vector<double> u;
    for (int i = 0; i < 4000; ++i) {
        double g = std::arg(gen_channel_coefficient(rng, 1.0, 1.0));
        if (g < 0)
            g += 2 * std::numbers::pi;
        u.push_back(g / (2 * std::numbers::pi));
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        d = std::max({d, (i + 1.0) / u.size() - u[i], u[i] - double(i) / u.size()});
    CHECK(d < 1.63 / std::sqrt(4000.0));  // 1% level
}

TEST_CASE("centralized generator")
{
    NoiseConfig cfg;
    cfg.d_min = cfg.d_max = 1.0;
    cfg.v_min = cfg.v_max = 1.0;
    auto one = gen_centralized_scenario(1, 1, cfg, 1.0, 3);
    CHECK(std::abs(one.channel(0, 0)) == doctest::Approx(1.0));

    auto s = gen_centralized_scenario(35, 4, NoiseConfig{}, 1.0, 11);
    CHECK(s.channel.rows() == 4);
    CHECK(s.channel.cols() == 35);
    CHECK(s == gen_centralized_scenario(35, 4, NoiseConfig{}, 1.0, 11));
    CHECK_FALSE(s == gen_centralized_scenario(35, 4, NoiseConfig{}, 1.0, 12));
    for (int i = 0; i < 35; ++i) {
        const double mod = std::abs(s.channel(0, i));
        CHECK(mod >= 0.1);
        CHECK(mod <= 1.0);
        for (int m = 1; m < 4; ++m)
            CHECK(std::abs(s.channel(m, i)) == doctest::Approx(mod).epsilon(1e-15));  // shared distance
        CHECK(s.sensor_noise_var(i) >= 0.5);
        CHECK(s.sensor_noise_var(i) <= 1.5);
    }
}

TEST_CASE("bad noise ranges")
{
    NoiseConfig cfg;
    cfg.d_min = 0.0;
    CHECK_THROWS_AS(gen_centralized_scenario(3, 1, cfg, 1.0, 1), Error);
    cfg = NoiseConfig{};
    cfg.v_max = 0.1;
    CHECK_THROWS_AS(gen_centralized_scenario(3, 1, cfg, 1.0, 1), Error);
    cfg = NoiseConfig{};
    cfg.noise_var = -1;
    CHECK_THROWS_AS(gen_centralized_scenario(3, 1, cfg, 1.0, 1), Error);
}

TEST_CASE("decentralized generator")
{
    auto pair = gen_decentralized_scenario(build_topology(2, {{0, 1}}), NoiseConfig{}, 1.0, 1);
    CHECK(pair.link_gain[0].size() + pair.link_gain[1].size() == 2);

    auto tree = build_topology(6, {{0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}});
    auto s = gen_decentralized_scenario(tree, NoiseConfig{}, 1.0, 2);
    std::size_t links = 0;
    for (const auto& row : s.link_gain)
        links += row.size();
    CHECK(links == 10);
    CHECK(s.gain(2, 3) != s.gain(3, 2));
    CHECK_THROWS_AS(s.gain(0, 5), Error);

    auto g = random_connected_topology(16, 0.3, 4);
    CHECK(gen_decentralized_scenario(g, NoiseConfig{}, 10.0, 5) ==
          gen_decentralized_scenario(g, NoiseConfig{}, 10.0, 5));
}

TEST_CASE("JSON round trip is bit exact")
{
    NoiseConfig cfg;
    cfg.alpha = 1.7;
    cfg.noise_var = 0.3;
    auto c = gen_centralized_scenario(7, 3, cfg, cdouble(0.1, -2.0 / 3.0), 21);
    auto back = scenario_from_json(parse_json_text(to_json(c).dump()));
    REQUIRE(std::holds_alternative<CentralizedScenario>(back));
    CHECK(std::get<CentralizedScenario>(back) == c);

    auto d = gen_decentralized_scenario(random_connected_topology(9, 0.4, 3), cfg, 10.0, 8);
    auto back_d = scenario_from_json(parse_json_text(to_json(d).dump(2)));
    REQUIRE(std::holds_alternative<DecentralizedScenario>(back_d));
    CHECK(std::get<DecentralizedScenario>(back_d) == d);
}

TEST_CASE("JSON errors")
{
    CHECK_THROWS_AS(parse_json_text("{not json"), Error);
    CHECK_THROWS_AS(scenario_from_json(Json{{"kind", "centralized"}}), Error);
    auto j = to_json(gen_centralized_scenario(2, 1, NoiseConfig{}, 1.0, 1));
    j["H"].erase(0);
    CHECK_THROWS_AS(scenario_from_json(j), Error);
    j = to_json(gen_centralized_scenario(2, 1, NoiseConfig{}, 1.0, 1));
    j["kind"] = "other";
    CHECK_THROWS_AS(scenario_from_json(j), Error);

    auto d = to_json(gen_decentralized_scenario(build_topology(3, {{0, 1}, {1, 2}}),
                                                NoiseConfig{}, 1.0, 1));
    d["links"].push_back({{"rx", 1}, {"tx", 3}, {"gain", {1.0, 0.0}}});
    try {
        scenario_from_json(d);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InconsistentPlan);
    }
}
