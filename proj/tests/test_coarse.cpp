// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "hwgff/coarse.hpp"
#include "oracles.hpp"

using namespace hwgff;

namespace {

Coord const O{0, 0, 0};

struct Setup
{
    LatticeBox host;
    Environment env;
    SetMask VN, W;
    CoarseGrid grid;
};

// V_N = [-n, n]^3 inside W = [-w, w]^3, coarse scale override L.
Setup setup(int n, int w, int L, int K, EnvironmentSpec spec)
{
    Setup s;
    s.host = LatticeBox::ball(O, w + 1);
    s.env = sample_environment(spec, s.host);
    s.VN = SetMask::from_box(s.host, LatticeBox::ball(O, n));
    s.W = SetMask::from_box(s.host, LatticeBox::ball(O, w));
    s.grid = build_grid(s.VN, n, K, L);
    return s;
}

}  // namespace

TEST_CASE("coarse scale and grid")
{
    CHECK(coarse_scale(64, 3) == static_cast<int>(std::ceil(16.0 / std::pow(std::log(64.0), 1.0 / 6.0))));
    CHECK_THROWS(coarse_scale(2, 3));
    LatticeBox const host = LatticeBox::ball(O, 64);
    SetMask const VN = SetMask::from_box(host, LatticeBox::ball(O, 64));
    CoarseGrid const g = build_grid(VN, 64, 2);
    int const s = g.spacing();
    CHECK(s == 8 * g.L);
    std::size_t brute = 0;
    for (int x = -64; x <= 64; ++x)
        for (int y = -64; y <= 64; ++y)
            for (int z = -64; z <= 64; ++z)
                brute += (x % s == 0 && y % s == 0 && z % s == 0);
    CHECK(g.size() == brute);
    for (auto const& z : g.points)
        for (int c : z)
            CHECK(c % s == 0);
    CHECK(g.size() == 1);
    CoarseGrid const g2 = build_grid(VN, 64, 2, 2), g4 = build_grid(VN, 64, 4, 2);
    CHECK(g2.size() == 729);
    CHECK(g4.size() == 125);
    double const ratio = static_cast<double>(g2.size()) / static_cast<double>(g4.size());
    CHECK(ratio > 2.0);
    CHECK(ratio < 16.0);
    CHECK(g.B[0].volume() == static_cast<std::size_t>(std::pow(2 * g.L, 3)));
    CHECK(g.U[0].contains(g.B[0]));
    CHECK_THROWS(build_grid(VN, 64, 1));
}

TEST_CASE("nu coefficients")
{
    auto s = setup(8, 14, 1, 2, EnvironmentSpec::constant(1.0));
    REQUIRE(s.grid.size() == 27);
    // One box.
    auto const nu1 = nu_coefficients(s.env, s.grid, {13}, s.W);
    CHECK(nu1.total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nu1.weights[s.host.index(s.grid.points[13])] == doctest::Approx(1.0));
    // Two boxes exchanged by the reflection x -> -1 - x, which maps the
    // half-open box at -8 onto the one at 8 and W2 onto itself.
    LatticeBox const host2({-17, -16, -16}, {34, 33, 33});
    auto const env2 = sample_environment(EnvironmentSpec::constant(1.0), host2);
    SetMask const W2 = SetMask::from_box(host2, LatticeBox({-15, -14, -14}, {30, 29, 29}));
    SetMask const VN2 = SetMask::from_box(host2, LatticeBox::ball(O, 8));
    CoarseGrid const g2 = build_grid(VN2, 8, 2, 1);
    std::size_t a2 = 0, b2 = 0;
    for (std::size_t i = 0; i < g2.size(); ++i)
    {
        if (g2.points[i] == Coord{-8, 0, 0})
            a2 = i;
        if (g2.points[i] == Coord{8, 0, 0})
            b2 = i;
    }
    auto const nu2 = nu_coefficients(env2, g2, {a2, b2}, W2);
    CHECK(nu2.weights[host2.index(g2.points[a2])] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(nu2.weights[host2.index(g2.points[b2])] == doctest::Approx(0.5).epsilon(1e-8));

    // Three boxes in a slab, random environment, against the dense oracle.
    LatticeBox const host3({-11, -4, -4}, {22, 8, 8});
    auto const env3 = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, 5), host3);
    SetMask const VN3 = SetMask::from_box(host3, LatticeBox({-8, -1, -1}, {17, 3, 3}));
    SetMask const W3 = SetMask::from_box(host3, LatticeBox({-10, -3, -3}, {20, 6, 6}));
    CoarseGrid const g3 = build_grid(VN3, 8, 2, 1);
    REQUIRE(g3.size() == 3);
    std::vector<std::size_t> const sel = g3.all();
    auto const nu = nu_coefficients(env3, g3, sel, W3);
    auto const e = oracle::dense_equilibrium(env3, g3.union_of_boxes(sel), W3);
    double cap = 0.0;
    for (double v : e)
        cap += v;
    for (std::size_t i : sel)
    {
        double mass = 0.0;
        for (std::size_t j = 0; j < g3.B[i].volume(); ++j)
            mass += e[host3.index(g3.B[i].coord(j))];
        CHECK(nu.weights[host3.index(g3.points[i])] == doctest::Approx(mass / cap).epsilon(1e-8));
    }
    CHECK(nu.total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coarse functionals")
{
    auto s = setup(8, 11, 1, 2, EnvironmentSpec::iid_uniform(1.0, 2.0, 8));
    std::vector<std::size_t> const sel = {0, 13, 26};
    auto const nu = nu_coefficients(s.env, s.grid, sel, s.W);
    std::vector<double> nus;
    for (std::size_t i : sel)
        nus.push_back(nu.weights[s.host.index(s.grid.points[i])]);
    CoarseFunctionals cf(s.env, s.grid, sel, nus);

    Field c(s.host, FieldTag::generic, 2.5);
    cf.load(c);
    Selector f;
    for (std::size_t i : sel)
        f.push_back(s.grid.B[i].corner());
    CHECK(cf.z_f(f) == doctest::Approx(2.5).epsilon(1e-9));
    VertexMeasure none;
    CHECK(cf.z_f_beta_b(f, 0.0, 2.0, none) == doctest::Approx(2.0 * cf.z_f(f)));

    GffSampler sampler(s.env, s.W, 3);
    for (int t = 0; t < 5; ++t)
    {
        Field const phi = sampler.sample();
        cf.load(phi);
        CHECK(cf.z_sup() == doctest::Approx(cf.z_sup_enumerated()).epsilon(1e-12));
        for (std::size_t k = 0; k < cf.size(); ++k)
            for (std::size_t j = 0; j < cf.xi(k).size(); ++j)
                CHECK(cf.xi(k)[j] + cf.psi(k)[j] == doctest::Approx(cf.phi(k)[j]));
        auto const all_good = classify_boxes(cf, 0.0, 8);
        CHECK(all_good.n_good == cf.size());
        CHECK(classify_boxes(cf, 1e6, 8).n_good == 0);
    }
    Selector out = f;
    out[0] = Coord{100, 0, 0};
    CHECK_THROWS(cf.z_f(out));

    // Exit-law pairing: beta > 0 with eta the exit law from the centre.
    auto const eta = exit_distribution(s.env, O, 3);
    Field const phi = sampler.sample();
    cf.load(phi);
    double pairing = 0.0;
    for (std::size_t i = 0; i < eta.weights.size(); ++i)
        pairing += eta.weights[i] * phi.values[i];
    CHECK(cf.z_f_beta_b(f, 0.5, 1.5, eta) == doctest::Approx(1.5 * cf.z_f(f) - 0.5 * pairing));
}

TEST_CASE("covering")
{
    auto s = setup(16, 20, 1, 2, EnvironmentSpec::constant(1.0));
    int const L_hat = default_window(s.grid);
    CHECK(L_hat % s.grid.spacing() == 0);
    std::vector<std::uint8_t> all(s.grid.size(), 1), none(s.grid.size(), 0);
    for (double rho : {0.0, 0.5, 0.9})
        CHECK(covering_check(s.grid, all, rho, L_hat, s.VN).pass);
    CHECK_FALSE(covering_check(s.grid, none, 0.5, L_hat, s.VN).pass);

    // Single window around the origin: passing is a binomial tail event.
    SetMask centre(s.host);
    centre.insert(s.host.index(O));
    std::size_t const m = covering_check(s.grid, all, 0.5, L_hat, centre).windows.at(0).in_grid;
    REQUIRE(m == s.grid.size());
    double const keep = 0.55;
    std::size_t const need = static_cast<std::size_t>(std::ceil(0.5 * m));
    double tail = 0.0;
    for (std::size_t k = need; k <= m; ++k)
        tail += std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0)
                         + k * std::log(keep) + (m - k) * std::log(1.0 - keep));
    Philox4x32 rng(44);
    int passes = 0;
    int const trials = 4000;
    for (int t = 0; t < trials; ++t)
    {
        std::vector<std::uint8_t> sel(s.grid.size());
        for (auto& v : sel)
            v = rng.uniform() < keep;
        passes += covering_check(s.grid, sel, 0.5, L_hat, centre).pass;
    }
    double const se = std::sqrt(tail * (1.0 - tail) / trials);
    CHECK(std::abs(passes / static_cast<double>(trials) - tail) < 4.0 * se);
}

TEST_CASE("solidification probe")
{
    auto s = setup(8, 14, 1, 2, EnvironmentSpec::iid_uniform(1.0, 2.0, 2));
    SetMask const probe = epsilon_bulk(Shape::cube(3, 1.0), 0.5, 8, s.host);
    auto const empty = solidification_probe(s.env, s.grid, {}, probe, s.W);
    CHECK(empty.sup_escape == 1.0);
    auto const full = solidification_probe(s.env, s.grid, s.grid.all(), probe, s.W);
    SetMask const S = s.grid.union_of_boxes(s.grid.all());
    for (std::size_t i : probe.indices())
    {
        if (S.contains(i))
            CHECK(full.escape.values[i] == 0.0);
        CHECK(full.escape.values[i] >= 0.0);
        CHECK(full.escape.values[i] <= 1.0);
    }
    CHECK(full.sup_escape < 1.0);
    CHECK(full.ratio > 0.0);
    CHECK(full.cap_S == doctest::Approx(capacity(s.env, S, s.W)).epsilon(1e-8));
}
