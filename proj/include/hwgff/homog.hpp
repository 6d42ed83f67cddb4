// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "hwgff/environment.hpp"
#include "hwgff/lattice.hpp"
#include "hwgff/potential.hpp"
#include "hwgff/stats.hpp"

namespace hwgff {

/// g_{B(0,R)}(0,0) for the environment sampled on B(0, R + 1).
double ball_green_diagonal(EnvironmentSpec const& spec, int d, int R, SolverOptions opts = {});

struct GbarResult
{
    Estimate mean;
    double max = 0.0;
    std::vector<double> values;  // per environment
    /// Running maximum after 1, 2, ..., n_env environments.
    std::vector<double> running_max;
};

/// On-site variance g_{B(0,R)}(0,0) over n_env environments with seeds
/// derived from `seed`.
GbarResult gbar_estimate(EnvironmentSpec const& spec, int d, int R, std::size_t n_env,
                         std::uint64_t seed, SolverOptions opts = {});

struct GbarIdentity
{
    double g_lambda = 0.0;  // lambda-constant environment
    double g_unit = 0.0;    // unit environment
    double ratio = 0.0;     // g_lambda / (g_unit / lambda)
    double rel_error = 0.0;
    std::vector<double> deltas;
    std::vector<double> lower_bounds;  // g_unit / (lambda + delta)
};

GbarIdentity gbar_identity_check(double lambda, double Lambda, int d, int R,
                                 std::vector<double> deltas = {0.1, 0.5},
                                 SolverOptions opts = {});

//---------------------------------------------------------------------------//
struct ScalingStudy
{
    EnvironmentSpec env;
    Shape shape;
    std::vector<int> ladder;
    std::size_t replications = 1;
    double padding = 4.0;  // killing box side / side of the blow-up hull
    std::uint64_t seed = 0;
};

struct ScalingRow
{
    int N = 0;
    double value = 0.0;       // N^{2-d} Cap_W(V_N), first replication
    double bound = 0.0;       // truncation error bound on `value`
    Estimate replicated;      // mean and SE across replications
    double spread = 0.0;      // max - min across replications
    std::vector<double> values;
};

struct ScalingResult
{
    std::vector<ScalingRow> rows;
    std::vector<double> differences;  // |a_{k+1} - a_k|
    double extrapolated = 0.0;        // first-order Richardson in 1/N
    bool cauchy = false;              // successive differences shrink
};

/// Killing box for N * shape padded by the given factor.
LatticeBox killing_box(Shape const& shape, int N, double padding);

ScalingResult capacity_scaling(ScalingStudy const& study, SolverOptions opts = {});

//---------------------------------------------------------------------------//
struct ConvergenceRow
{
    int N = 0;
    double cross_discrepancy = 0.0;  // sup |h^omega - h^omega'| over pairs
    double comparator_gap = -1.0;    // constant env vs Brownian annulus law
};

/// Continuum potential of the ball of radius a killed on the sphere of
/// radius R (d >= 3): 1 inside, (|x|^{2-d} - R^{2-d}) / (a^{2-d} - R^{2-d})
/// in between, 0 outside.
double ball_annulus_potential(double r, double a, double R, int d);

/// h^omega_{V_N} killed outside the Euclidean ball of radius padding * N * r
/// for V the ball of radius r centred at 0; compares several environments
/// pointwise and, for constant laws, against the continuum potential.
std::vector<ConvergenceRow> potential_convergence(std::vector<EnvironmentSpec> const& envs,
                                                  double radius, int d,
                                                  std::vector<int> const& ladder,
                                                  double padding = 4.0, SolverOptions opts = {});

}  // namespace hwgff
