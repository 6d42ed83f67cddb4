// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hwgff/homog.hpp"

using namespace hwgff;

TEST_CASE("ball green diagonal")
{
    double const unit = ball_green_diagonal(EnvironmentSpec::constant(1.0), 3, 4);
    CHECK(ball_green_diagonal(EnvironmentSpec::constant(2.5), 3, 4) == doctest::Approx(unit / 2.5).epsilon(1e-12));
    std::vector<double> g;
    for (int R : {2, 4, 8})
        g.push_back(ball_green_diagonal(EnvironmentSpec::constant(1.0), 3, R));
    CHECK(g[0] < g[1]);
    CHECK(g[1] < g[2]);
    double const limit = fixtures::g_srw / 6.0;
    CHECK(g[2] < limit + 4.0 * fixtures::g_srw_se / 6.0);
    CHECK(limit - g[2] < limit - g[0]);
    CHECK_THROWS(ball_green_diagonal(EnvironmentSpec::constant(1.0), 3, -1));
}

TEST_CASE("gbar identity")
{
    for (double lambda : {0.5, 1.0, 2.0})
    {
        auto const id = gbar_identity_check(lambda, 2.0 * lambda, 3, 4);
        CHECK(id.rel_error < 1e-10);
        for (std::size_t i = 0; i < id.deltas.size(); ++i)
            CHECK(id.g_lambda >= id.lower_bounds[i]);
    }
    CHECK(gbar_identity_check(1.0, 1.0, 3, 4).ratio == doctest::Approx(1.0).epsilon(1e-12));
    // Rayleigh: smaller lambda, larger Green value.
    CHECK(gbar_identity_check(0.5, 1.0, 3, 4).g_lambda > gbar_identity_check(1.0, 1.0, 3, 4).g_lambda);
}

TEST_CASE("gbar estimate")
{
    auto const spec = EnvironmentSpec::iid_two_point(1.0, 3.0, 0.5, 0);
    auto const r = gbar_estimate(spec, 3, 3, 12, 99);
    REQUIRE(r.values.size() == 12);
    for (std::size_t i = 1; i < r.running_max.size(); ++i)
        CHECK(r.running_max[i] >= r.running_max[i - 1]);
    double const g_lambda = ball_green_diagonal(EnvironmentSpec::constant(1.0), 3, 3);
    CHECK(r.max <= g_lambda + 1e-10);
    CHECK(r.mean.n == 12);
    CHECK_THROWS(gbar_estimate(spec, 3, 1, 3, 1));
}

TEST_CASE("capacity scaling table")
{
    ScalingStudy st;
    st.env = EnvironmentSpec::constant(1.0);
    st.shape = Shape::cube(3, 1.0);
    st.ladder = {2, 4, 8};
    st.padding = 3.0;
    auto const a = capacity_scaling(st);
    st.env = EnvironmentSpec::constant(2.0);
    auto const b = capacity_scaling(st);
    REQUIRE(a.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(b.rows[i].value == doctest::Approx(2.0 * a.rows[i].value).epsilon(1e-9));
        CHECK(a.rows[i].bound > 0.0);
    }
    CHECK(a.differences.size() == 2);
    st.ladder = {4, 2};
    CHECK_THROWS(capacity_scaling(st));
}

TEST_CASE("ball potential comparator")
{
    CHECK(ball_annulus_potential(0.5, 1.0, 4.0, 3) == 1.0);
    CHECK(ball_annulus_potential(5.0, 1.0, 4.0, 3) == 0.0);
    CHECK(ball_annulus_potential(2.0, 1.0, 4.0, 3) == doctest::Approx((0.5 - 0.25) / (1.0 - 0.25)));
    CHECK_THROWS(ball_annulus_potential(1.0, 1.0, 2.0, 2));
    auto const rows = potential_convergence({EnvironmentSpec::constant(1.0)}, 1.0, 3, {3, 6}, 3.0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].comparator_gap < rows[0].comparator_gap);
    CHECK(rows[0].cross_discrepancy == 0.0);
}
