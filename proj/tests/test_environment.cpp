// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "hwgff/environment.hpp"
#include "hwgff/stats.hpp"

using namespace hwgff;

namespace {

LatticeBox const cube3({0, 0, 0}, {3, 3, 3});

}  // namespace

TEST_CASE("deterministic laws")
{
    auto const one = sample_environment(EnvironmentSpec::constant(1.0), cube3);
    for (double w : one.edges())
        CHECK(w == 1.0);
    CHECK(one.mu(0) == 6.0);
    auto const two = sample_environment(EnvironmentSpec::iid_two_point(1.0, 2.0, 0.0, 9), cube3);
    for (double w : two.edges())
        CHECK(w == 2.0);
    auto const low = sample_environment(EnvironmentSpec::iid_two_point(1.0, 2.0, 1.0, 9), cube3);
    for (double w : low.edges())
        CHECK(w == 1.0);
}

TEST_CASE("iid uniform mean")
{
    // 10^4 edges: a 3x3x3 box is too small, so tile hosts with the same seed
    // at disjoint offsets.
    RunningStats rs;
    auto const spec = EnvironmentSpec::iid_uniform(1.0, 2.0, 42);
    for (int t = 0; rs.count() < 10000; ++t)
    {
        LatticeBox const host({10 * t, 0, 0}, {3, 3, 3});
        for (double w : sample_environment(spec, host).edges())
        {
            CHECK(w >= 1.0);
            CHECK(w <= 2.0);
            rs.add(w);
        }
    }
    CHECK(std::abs(rs.mean() - 1.5) < 4.0 * rs.sem());
}

TEST_CASE("overlapping hosts share edges")
{
    for (auto const& spec : {EnvironmentSpec::iid_uniform(0.5, 3.0, 7),
                             EnvironmentSpec::iid_two_point(1.0, 4.0, 0.3, 7),
                             EnvironmentSpec::finite_range_mixing(3, EnvironmentSpec::iid_uniform(1.0, 2.0, 7))})
    {
        auto const a = sample_environment(spec, LatticeBox({-3, -3, -3}, {6, 6, 6}));
        auto const b = sample_environment(spec, LatticeBox({0, -1, -2}, {5, 5, 5}));
        for (int x = 0; x < 2; ++x)
            for (int y = -1; y < 2; ++y)
                for (int z = -2; z < 2; ++z)
                    for (int ax = 0; ax < 3; ++ax)
                    {
                        CHECK(a.weight({x, y, z}, ax) == b.weight({x, y, z}, ax));
                        CHECK(a.weight({x, y, z}, ax) == edge_conductance(spec, {x, y, z}, ax));
                    }
        CHECK(a.min_weight() >= spec.lambda);
        CHECK(a.max_weight() <= spec.Lambda);
    }
}

TEST_CASE("finite-range dependence")
{
    auto const spec = EnvironmentSpec::finite_range_mixing(5, EnvironmentSpec::iid_uniform(1.0, 2.0, 3));
    auto const base = EnvironmentSpec::iid_uniform(1.0, 2.0, 4);
    auto const other = EnvironmentSpec::finite_range_mixing(5, base);
    // Averages of vertex draws: neighbouring edges are positively
    // correlated; edges far apart are independent.
    RunningStats near, far;
    for (int t = 0; t < 4000; ++t)
    {
        Coord const x{37 * t, 0, 0};
        Coord const y{37 * t + 1, 0, 0};
        Coord const z{37 * t + 20, 0, 0};
        double const a = edge_conductance(spec, x, 1) - 1.5;
        near.add(a * (edge_conductance(spec, y, 1) - 1.5));
        far.add(a * (edge_conductance(spec, z, 1) - 1.5));
    }
    CHECK(near.mean() > 4.0 * near.sem());
    CHECK(std::abs(far.mean()) < 4.0 * far.sem());
    CHECK(edge_conductance(other, {0, 0, 0}, 0) != edge_conductance(spec, {0, 0, 0}, 0));
}

TEST_CASE("validation")
{
    CHECK_THROWS(EnvironmentSpec::iid_uniform(0.0, 1.0, 1).validate());
    CHECK_THROWS(EnvironmentSpec::iid_uniform(2.0, 1.0, 1).validate());
    CHECK_THROWS(EnvironmentSpec::iid_two_point(1.0, 2.0, 1.5, 1).validate());
    CHECK_THROWS(EnvironmentSpec::constant(-1.0).validate());
    CHECK_NOTHROW(EnvironmentSpec::constant(2.0).validate());
    for (auto law : {EnvironmentSpec::Law::constant, EnvironmentSpec::Law::iid_uniform,
                     EnvironmentSpec::Law::iid_two_point, EnvironmentSpec::Law::finite_range})
        CHECK(law_from_string(to_string(law)) == law);
    CHECK_THROWS(law_from_string("gamma"));
}

TEST_CASE("serialization round trips")
{
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 3.0, 17), LatticeBox({-2, 0, 1}, {3, 4, 2}));
    std::stringstream ss;
    write_environment_binary(ss, env);
    auto const back = read_environment_binary(ss);
    CHECK(back.host() == env.host());
    CHECK(back.same_weights(env));
    CHECK(back.spec().seed == 17);
    auto const j = environment_from_json(environment_to_json(env));
    CHECK(j.same_weights(env));
    std::stringstream bad("HWGFENV0garbage");
    CHECK_THROWS(read_environment_binary(bad));
    auto edges = env.edges();
    edges[0] = 10.0;
    CHECK_THROWS(Environment::from_edges(env.host(), env.spec(), edges));
}

TEST_CASE("scaling")
{
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, 1), cube3);
    auto const s = env.scaled(0.5);
    for (std::size_t i = 0; i < cube3.volume(); ++i)
        CHECK(s.mu(i) == doctest::Approx(0.5 * env.mu(i)));
    CHECK(s.lambda() == doctest::Approx(0.5));
    CHECK_THROWS(env.scaled(0.0));
}
