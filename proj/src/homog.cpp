// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hwgff/rng.hpp"

namespace hwgff {

double ball_green_diagonal(EnvironmentSpec const& spec, int d, int R, SolverOptions opts)
{
    if (R < 0)
        throw std::invalid_argument("ball_green_diagonal: R must be nonnegative");
    Coord const origin(d, 0);
    LatticeBox const host = LatticeBox::ball(origin, R + 1);
    Environment const env = sample_environment(spec, host);
    SetMask const U = SetMask::from_box(host, LatticeBox::ball(origin, R));
    auto const op = PrecisionOperator::assemble(env, U);
    return killed_green_column(op, host.index(origin), opts).at(origin);
}

GbarResult gbar_estimate(EnvironmentSpec const& spec, int d, int R, std::size_t n_env,
                         std::uint64_t seed, SolverOptions opts)
{
    if (R < 2)
        throw std::invalid_argument("gbar_estimate: need R >= 2");
    if (n_env < 1)
        throw std::invalid_argument("gbar_estimate: need n_env >= 1");
    GbarResult res;
    RunningStats rs;
    res.max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_env; ++i)
    {
        EnvironmentSpec s = spec;
        s.seed = derive_seed(seed, i);
        double const g = ball_green_diagonal(s, d, R, opts);
        res.values.push_back(g);
        rs.add(g);
        res.max = std::max(res.max, g);
        res.running_max.push_back(res.max);
    }
    res.mean = rs.estimate();
    return res;
}

GbarIdentity gbar_identity_check(double lambda, double Lambda, int d, int R,
                                 std::vector<double> deltas, SolverOptions opts)
{
    if (!(lambda > 0.0) || !(lambda <= Lambda))
        throw std::invalid_argument("gbar_identity_check: need 0 < lambda <= Lambda");
    GbarIdentity res;
    res.g_lambda = ball_green_diagonal(EnvironmentSpec::constant(lambda, lambda, Lambda), d, R, opts);
    res.g_unit = ball_green_diagonal(EnvironmentSpec::constant(1.0), d, R, opts);
    res.ratio = res.g_lambda / (res.g_unit / lambda);
    res.rel_error = std::abs(res.ratio - 1.0);
    res.deltas = std::move(deltas);
    for (double dl : res.deltas)
        res.lower_bounds.push_back(res.g_unit / (lambda + dl));
    return res;
}

//---------------------------------------------------------------------------//
LatticeBox killing_box(Shape const& shape, int N, double padding)
{
    return padded_box(shape.lattice_hull(N), padding);
}

ScalingResult capacity_scaling(ScalingStudy const& study, SolverOptions opts)
{
    if (study.ladder.empty())
        throw std::invalid_argument("capacity_scaling: empty N ladder");
    for (std::size_t i = 1; i < study.ladder.size(); ++i)
        if (study.ladder[i] <= study.ladder[i - 1])
            throw std::invalid_argument("capacity_scaling: ladder must be strictly increasing");
    if (study.replications < 1)
        throw std::invalid_argument("capacity_scaling: need at least one replication");
    int const d = study.shape.dim();
    ScalingResult res;
    for (int N : study.ladder)
    {
        LatticeBox const wbox = killing_box(study.shape, N, study.padding);
        LatticeBox const host = padded_box(wbox, 1.0);
        SetMask const W = SetMask::from_box(host, wbox);
        SetMask const A = discrete_blowup(study.shape, N, host);
        if (A.empty())
            throw std::invalid_argument("capacity_scaling: empty blow-up at N = " + std::to_string(N));

        // Lattice gap between the blow-up hull and the first killed layer.
        LatticeBox const hull = study.shape.lattice_hull(N);
        int gap = std::numeric_limits<int>::max();
        for (int i = 0; i < d; ++i)
        {
            gap = std::min(gap, hull.corner()[i] - wbox.corner()[i] + 1);
            gap = std::min(gap, wbox.upper()[i] - hull.upper()[i] + 1);
        }

        ScalingRow row;
        row.N = N;
        RunningStats rs;
        for (std::size_t r = 0; r < study.replications; ++r)
        {
            EnvironmentSpec spec = study.env;
            spec.seed = derive_seed(study.seed, r);
            Environment const env = sample_environment(spec, host);
            double const cap = capacity(env, A, W, opts);
            double const a = cap * std::pow(static_cast<double>(N), 2.0 - d);
            row.values.push_back(a);
            rs.add(a);
            if (r == 0)
            {
                row.value = a;
                double const q = cap * green_decay_constant(d, env.lambda())
                                 * std::pow(static_cast<double>(gap), 2.0 - d);
                row.bound = q < 1.0 ? a * q / (1.0 - q) : std::numeric_limits<double>::infinity();
            }
        }
        row.replicated = rs.estimate();
        auto const [lo, hi] = std::minmax_element(row.values.begin(), row.values.end());
        row.spread = *hi - *lo;
        res.rows.push_back(row);
    }
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        res.differences.push_back(std::abs(res.rows[i].value - res.rows[i - 1].value));
    res.cauchy = res.differences.size() >= 2;
    for (std::size_t i = 1; i < res.differences.size(); ++i)
        res.cauchy = res.cauchy && res.differences[i] < res.differences[i - 1];
    if (res.rows.size() >= 2)
    {
        auto const& r1 = res.rows[res.rows.size() - 2];
        auto const& r2 = res.rows.back();
        res.extrapolated = (r2.N * r2.value - r1.N * r1.value) / static_cast<double>(r2.N - r1.N);
    }
    else
    {
        res.extrapolated = res.rows.back().value;
    }
    return res;
}

//---------------------------------------------------------------------------//
double ball_annulus_potential(double r, double a, double R, int d)
{
    if (d < 3)
        throw std::invalid_argument("ball_annulus_potential: needs d >= 3");
    if (r <= a)
        return 1.0;
    if (r >= R)
        return 0.0;
    double const e = 2.0 - d;
    return (std::pow(r, e) - std::pow(R, e)) / (std::pow(a, e) - std::pow(R, e));
}

std::vector<ConvergenceRow> potential_convergence(std::vector<EnvironmentSpec> const& envs,
                                                  double radius, int d,
                                                  std::vector<int> const& ladder, double padding,
                                                  SolverOptions opts)
{
    if (envs.empty())
        throw std::invalid_argument("potential_convergence: no environments");
    if (!(padding > 1.0))
        throw std::invalid_argument("potential_convergence: padding must exceed 1");
    std::vector<ConvergenceRow> rows;
    Coord const origin(d, 0);
    for (int N : ladder)
    {
        double const a = N * radius;
        double const R = padding * a;
        LatticeBox const host = LatticeBox::ball(origin, static_cast<int>(std::ceil(R)) + 1);
        SetMask const A = discrete_blowup(Shape::unit_ball(d, radius), N, host);
        SetMask const W = discrete_blowup(Shape::unit_ball(d, padding * radius), N, host);

        std::vector<Field> hs;
        ConvergenceRow row;
        row.N = N;
        for (auto const& spec : envs)
        {
            Environment const env = sample_environment(spec, host);
            hs.push_back(harmonic_potential(env, A, W, opts));
            if (spec.law == EnvironmentSpec::Law::constant)
            {
                double gap = 0.0;
                for (std::size_t idx : W.indices())
                {
                    double r2 = 0.0;
                    for (int i = 0; i < d; ++i)
                        r2 += static_cast<double>(host.coord(idx, i)) * host.coord(idx, i);
                    double const ref = ball_annulus_potential(std::sqrt(r2), a, R, d);
                    gap = std::max(gap, std::abs(hs.back().values[idx] - ref));
                }
                row.comparator_gap = std::max(row.comparator_gap, gap);
            }
        }
        // Cross-environment gaps only between draws of the same law.
        auto same_law = [](EnvironmentSpec const& x, EnvironmentSpec const& y) {
            return x.law == y.law && x.lambda == y.lambda && x.Lambda == y.Lambda
                   && x.value == y.value && x.p == y.p && x.range == y.range && x.base == y.base;
        };
        for (std::size_t i = 0; i < hs.size(); ++i)
            for (std::size_t j = i + 1; j < hs.size(); ++j)
                if (same_law(envs[i], envs[j]))
                for (std::size_t idx = 0; idx < host.volume(); ++idx)
                    row.cross_discrepancy = std::max(
                        row.cross_discrepancy, std::abs(hs[i].values[idx] - hs[j].values[idx]));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hwgff
