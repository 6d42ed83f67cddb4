// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hwgff/gff.hpp"
#include "hwgff/potential.hpp"
#include "hwgff/stats.hpp"

namespace hwgff {

class HardWallError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// alpha_N = sqrt(4 g_hat log N); zero for N < 2.
double repulsion_level(double g_hat, int N);

//---------------------------------------------------------------------------//
/*!
 * Zero-boundary field on U conditioned to be nonnegative on the wall set.
 */
struct HardWallProblem
{
    Environment env;
    SetMask U;
    SetMask wall;
    int N = 0;
    double g_hat = 0.0;
    std::optional<Field> tilt;

    PrecisionOperator op;
    std::vector<std::uint8_t> on_wall;  // local numbering of U

    static HardWallProblem create(Environment env, SetMask U, SetMask wall, int N, double g_hat);

    double alpha() const { return repulsion_level(g_hat, N); }
    std::size_t wall_size() const { return wall.count(); }
};

/// m_x(phi) = (1/mu_x) sum_{y~x} omega_xy phi_y (values outside the field's
/// box count as zero).
double local_mean(Environment const& env, Field const& phi, std::size_t x);

//---------------------------------------------------------------------------//
struct ChainState
{
    Field field;
    std::uint64_t sweeps = 0;
    Philox4x32 rng;
};

/// Chain started from `start` or, by default, from alpha_N h_{wall,U}.
ChainState start_chain(HardWallProblem const& problem, std::uint64_t seed,
                       std::optional<Field> start = std::nullopt);

/// Resample site k of U (local numbering) from its conditional law.
double gibbs_site_update(HardWallProblem const& problem, ChainState& state, std::size_t k);

/// One systematic scan over U in index order.
void gibbs_sweep(HardWallProblem const& problem, ChainState& state);

void write_checkpoint(std::ostream& os, ChainState const& state);
ChainState read_checkpoint(std::istream& is);

//---------------------------------------------------------------------------//
struct ChainOptions
{
    std::size_t burn_in = 0;  // 0: 50 |U|^{1/d}
    std::size_t n_sweeps = 10000;
    std::size_t n_batches = 20;
    std::size_t record_every = 1;
    std::uint64_t seed = 0;
    /// Host-index pairs whose product moments are recorded.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::optional<Field> start;
};

/// Per-site chain averages (local numbering of U) with batch-means SEs.
struct ChainOutput
{
    std::vector<Estimate> mean;      // E^+[phi_x]
    std::vector<Estimate> mean_rb;   // E^+[E(phi_x | rest)]
    std::vector<Estimate> variance;  // Var^+(phi_x), jackknife
    std::vector<Estimate> lhs;       // E^+[phi_x - m_x]
    std::vector<Estimate> rhs;       // E^+[(2 pi mu)^{-1/2} exp(-mu m^2/2) / Phi(m sqrt(mu))]
    std::vector<Estimate> lhs_minus_rhs;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<Estimate> pair_cov;  // Cov^+(phi_x, phi_y), jackknife
    std::vector<double> trace;       // sum of phi over U per recorded sweep
    ConvergenceGate gate;
    std::size_t burn_in = 0;
    std::size_t sweeps = 0;
    std::size_t samples = 0;
    std::size_t site_updates = 0;
    bool nonnegative = true;  // every post-sweep state was >= 0 on the wall

    Field mean_field(HardWallProblem const& problem) const;
    Field se_field(HardWallProblem const& problem) const;
};

std::size_t default_burn_in(SetMask const& U);

ChainOutput run_chain(HardWallProblem const& problem, ChainOptions const& opts);

//---------------------------------------------------------------------------//
// Reports
//---------------------------------------------------------------------------//
struct SuperharmonicityReport
{
    struct Site
    {
        std::size_t index;  // host index
        bool on_wall;
        Estimate lhs;
        Estimate rhs;
        Estimate diff;
        bool pass;
    };
    std::vector<Site> sites;
    double k_se = 4.0;
    bool identity_pass = true;   // wall sites: LHS - RHS within k SE
    bool offwall_pass = true;    // off-wall LHS within k SE of 0
    bool superharmonic = true;   // -L(mean) >= -k SE on the wall
};

SuperharmonicityReport superharmonicity_check(HardWallProblem const& problem,
                                              ChainOutput const& out, double k_se = 4.0);

/// alpha_N h_{wall,B}.
Field make_tilt(HardWallProblem const& problem, SetMask const& B, SolverOptions opts = {});

enum class LogProbMethod
{
    direct,
    tilted,
    fkg_bound
};

std::string to_string(LogProbMethod m);
LogProbMethod logprob_method_from_string(std::string const& s);

struct LogProbResult
{
    LogProbMethod method = LogProbMethod::direct;
    Estimate log_prob;
    std::size_t hits = 0;
    double ess = 0.0;
    Estimate mean_log_weight;  // tilted only
    double tilt_energy = 0.0;  // E(f, f), tilted only
};

/// Estimate log P[phi >= 0 on the wall]. The tilted estimator uses
/// problem.tilt when set and alpha_N h_{wall,U} otherwise.
LogProbResult hardwall_logprob(HardWallProblem const& problem, LogProbMethod method,
                               std::size_t n, std::uint64_t seed);

struct ProfileRow
{
    std::size_t index;
    Estimate mean;
    double h = 0.0;
    double ratio = 0.0;  // mean / (alpha_N h)
};

struct RepulsionProfile
{
    std::vector<ProfileRow> rows;  // every vertex of U
    std::size_t center = 0;        // host index of the wall vertex nearest the wall centroid
    Estimate center_mean;
    Estimate center_mean_rb;
    double center_ratio = 0.0;
    double alpha = 0.0;
    Estimate defect;     // sup over wall interior of |-L(mean)|
    Estimate defect_rb;  // same from the conditional-expectation representation
    Estimate far_field;  // largest mean over sites adjacent to the boundary of U
    double far_field_h = 0.0;
};

RepulsionProfile repulsion_profile_report(HardWallProblem const& problem, ChainOutput const& out,
                                          SolverOptions opts = {});

struct CovarianceReport
{
    struct Pair
    {
        std::size_t x, y;
        Estimate cov;
        double green = 0.0;
        Estimate gap;  // cov - green
    };
    std::vector<Pair> pairs;
    struct Site
    {
        std::size_t index;
        Estimate variance;
        double green = 0.0;
        bool pass;
    };
    std::vector<Site> wall_sites;
    bool brascamp_lieb_pass = true;
};

CovarianceReport recentered_covariance_check(HardWallProblem const& problem,
                                             ChainOutput const& out, double k_se = 4.0,
                                             SolverOptions opts = {});

struct RegularityReport
{
    Estimate max_gap;  // max adjacent |mean_x - mean_y| over the wall interior
    std::size_t x = 0, y = 0;
    double alpha = 0.0;
    bool below_alpha = true;
};

RegularityReport regularity_check(HardWallProblem const& problem, ChainOutput const& out);

}  // namespace hwgff
