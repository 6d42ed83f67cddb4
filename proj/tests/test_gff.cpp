// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hwgff/gff.hpp"
#include "hwgff/stats.hpp"
#include "oracles.hpp"

using namespace hwgff;

namespace {

Coord const O{0, 0, 0};

/// Bulk on-site variance of the unit environment.
double bulk_variance()
{
    LatticeBox const host = LatticeBox::ball(O, 9);
    auto const env = sample_environment(EnvironmentSpec::constant(1.0), host);
    return killed_green_column(PrecisionOperator::assemble(env, interior_of(host)), host.index(O)).at(O);
}

}  // namespace

TEST_CASE("single-site field")
{
    LatticeBox const host = LatticeBox::ball(O, 1);
    SetMask U(host);
    U.insert(host.index(O));
    auto const env = sample_environment(EnvironmentSpec::constant(2.0), host);
    GffSampler s(env, U, 9);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i)
        xs.push_back(s.sample().at(O));
    double const sd = 1.0 / std::sqrt(12.0);
    CHECK(ks_test(xs, [&](double x) { return normal_cdf(x / sd); }).p_value > 0.01);
}

TEST_CASE("nested dissection order is a permutation")
{
    LatticeBox const host = LatticeBox::ball(O, 6);
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, 1), host);
    auto const op = PrecisionOperator::assemble(env, interior_of(host));
    auto order = nested_dissection_order(op);
    REQUIRE(order.size() == op.size());
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i)
        CHECK(order[i] == i);
    GffSampler const s(op, 1);
    CHECK(s.factor_residual() < 1e-12);
}

TEST_CASE("sampler covariance")
{
    LatticeBox const host({0, 0, 0}, {5, 5, 5});
    SetMask const U = interior_of(host);
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 3.0, 14), host);
    GffSampler s(env, U, 123);
    auto const dense = oracle::dense_precision(env, U);
    Eigen::MatrixXd const G = oracle::dense_green(dense);
    std::size_t const n = s.size(), m = 40000;
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n, n), s2 = s1;
    std::vector<double> x(n);
    for (std::size_t t = 0; t < m; ++t)
    {
        s.sample_local(x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                double const v = x[i] * x[j];
                s1(i, j) += v;
                s2(i, j) += v * v;
            }
    }
    // Local numbering follows host index order, as does the oracle.
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
        {
            double const c = s1(i, j) / m;
            double const se = std::sqrt((s2(i, j) / m - c * c) / (m - 1.0));
            bad += std::abs(c - G(i, j)) > 4.0 * se;
        }
    CHECK(bad == 0);
    // Same seed, same stream.
    GffSampler a(env, U, 5), b(env, U, 5);
    CHECK(a.sample_local() == b.sample_local());
    GffSampler c = a.with_seed(6);
    CHECK(c.sample_local() != b.sample_local());
}

TEST_CASE("markov decomposition")
{
    LatticeBox const host({-4, -4, -4}, {9, 9, 9});
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, 3), host);
    SetMask const U = SetMask::from_box(host, LatticeBox::ball(O, 1));
    HarmonicExtender const ext(env, U);

    // Harmonic input: psi vanishes.
    Field const h = harmonic_potential(env, SetMask::from_box(host, LatticeBox::ball(Coord{3, 3, 3}, 0)),
                                       interior_of(host));
    Field hin = h;
    auto const d0 = markov_decompose(ext, hin);
    for (std::size_t i : U.indices())
        CHECK(std::abs(d0.psi.values[i]) < 1e-9);

    // Zero outside values: xi vanishes.
    Field z(host, FieldTag::gff_sample, 0.0);
    for (std::size_t i : U.indices())
        z.values[i] = 1.0 + i;
    auto const d1 = markov_decompose(ext, z);
    for (std::size_t i : U.indices())
    {
        CHECK(d1.xi.values[i] == doctest::Approx(0.0).scale(1.0));
        CHECK(d1.psi.values[i] == z.values[i]);
    }
    for (std::size_t i = 0; i < host.volume(); ++i)
        CHECK(d1.xi.values[i] + d1.psi.values[i] == doctest::Approx(z.values[i]));
    Field missing = z;
    missing.values[host.index(Coord{2, 0, 0})] = std::nan("");
    CHECK_THROWS(ext.extend(missing));
}

TEST_CASE("expected maximum")
{
    LatticeBox const host({0, 0, 0}, {7, 7, 7});
    SetMask const U = interior_of(host);
    auto const env = sample_environment(EnvironmentSpec::constant(1.0), host);
    SetMask D1(host);
    D1.insert(host.index(Coord{3, 3, 3}));
    auto const e1 = expected_max_estimate(env, U, D1, 4000, 1);
    CHECK(std::abs(e1.value) < 4.0 * e1.se);
    SetMask const D2 = SetMask::from_box(host, LatticeBox::ball(Coord{3, 3, 3}, 1));
    auto const e2 = expected_max_estimate(env, U, D2, 4000, 2);
    CHECK(e2.value + 4.0 * std::hypot(e1.se, e2.se) >= e1.value);
    auto const e3 = expected_max_estimate(env, U, U, 4000, 3);
    CHECK(e3.value > e2.value);
    CHECK_THROWS(expected_max_estimate(env, U, D1, 1, 1));
}

TEST_CASE("expected maximum growth")
{
    double const g_hat = bulk_variance();
    std::vector<double> ratios;
    Estimate prev{-1.0, 0.0, 0};
    for (int L : {4, 8, 16})
    {
        LatticeBox const host = LatticeBox::ball(O, L + L / 2 + 1);
        SetMask const U = interior_of(host);
        SetMask const D = SetMask::from_box(host, LatticeBox::ball(O, L));
        auto const env = sample_environment(EnvironmentSpec::constant(1.0), host);
        auto const e = expected_max_estimate(env, U, D, 300, 40 + L);
        CHECK(exceeds_by_joint_se(e, prev, 2.0));
        ratios.push_back(e.value / std::sqrt(2.0 * g_hat * std::log(static_cast<double>(D.count()))));
        prev = e;
    }
    CHECK(ratios[0] < ratios[2]);
    CHECK(ratios[2] < 1.0);
}
