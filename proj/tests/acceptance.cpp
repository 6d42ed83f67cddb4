// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, with wall time against
// the criterion's time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hwgff/coarse.hpp"
#include "hwgff/experiments.hpp"
#include "hwgff/gff.hpp"
#include "hwgff/hardwall.hpp"
#include "hwgff/homog.hpp"
#include "hwgff/potential.hpp"
#include "oracles.hpp"

using namespace hwgff;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20261014;
Coord const O{0, 0, 0};

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(char const* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string sci(double v) { return fmt("%.3g", v); }

SolverOptions cg_opts(double tol)
{
    SolverOptions o;
    o.kind = SolverOptions::Kind::cg;
    o.rel_tol = tol;
    return o;
}

SolverOptions dense_opts()
{
    SolverOptions o;
    o.kind = SolverOptions::Kind::dense;
    return o;
}

EnvironmentSpec law_cycle(std::size_t r, std::uint64_t seed)
{
    switch (r % 3)
    {
        case 0: return EnvironmentSpec::iid_uniform(1.0, 3.0, seed);
        case 1: return EnvironmentSpec::iid_two_point(1.0, 5.0, 0.5, seed);
        default: return EnvironmentSpec::finite_range_mixing(2, EnvironmentSpec::iid_uniform(1.0, 2.0, seed));
    }
}

bool assertion_passed(RunArtifacts const& art, std::string const& name)
{
    for (auto const& a : art.assertions)
        if (a.name == name)
            return a.passed;
    return false;
}

std::string bytes_of(RunArtifacts const& art) { return report_json(art, false).dump() + "\n" + results_csv(art); }

/// Artifacts kept for the reproducibility rerun.
struct Kept
{
    ExperimentConfig config;
    std::string bytes;
};
std::map<int, Kept> kept;

//---------------------------------------------------------------------------//
Outcome dense_oracle()
{
    std::vector<Coord> const shapes = {{2, 2, 2}, {4, 4, 4}, {6, 6, 6}, {8, 8, 8}, {4, 8, 16}, {2, 16, 16}, {3, 5, 7}};
    double worst = 0.0;
    std::size_t columns = 0;
    for (std::size_t r = 0; r < 20; ++r)
    {
        Coord const& s = shapes[r % shapes.size()];
        LatticeBox const host({-1, -1, -1}, {s[0] + 2, s[1] + 2, s[2] + 2});
        SetMask const U = interior_of(host);
        auto const env = sample_environment(law_cycle(r, kSeed + r), host);
        auto const d = oracle::dense_precision(env, U);
        Eigen::MatrixXd const G = oracle::dense_green(d);
        auto const op = PrecisionOperator::assemble(env, U);
        for (std::size_t y : d.sites)
        {
            Field const col = killed_green_column(op, y, cg_opts(1e-13));
            for (std::size_t x : d.sites)
                worst = std::max(worst, std::abs(col.values[x] - G(d.pos.at(x), d.pos.at(y))));
            ++columns;
        }
    }
    return {worst <= 1e-8, "max entrywise gap " + sci(worst) + " over " + std::to_string(columns) + " columns"};
}

//---------------------------------------------------------------------------//
Outcome potential_identities()
{
    double e_energy = 0.0, e_point = 0.0, e_green = 0.0, e_oracle = 0.0;
    bool monotone = true;
    SolverOptions const opts = cg_opts(1e-13);
    for (int i = 0; i < 10; ++i)
    {
        int const r = 2 + i % 3;
        LatticeBox const host = LatticeBox::ball(O, r + 3);
        auto const spec = i % 2 ? EnvironmentSpec::iid_two_point(1.0, 4.0, 0.3, kSeed + 50 + i)
                                : EnvironmentSpec::iid_uniform(1.0, 2.0, kSeed + 50 + i);
        auto const env = sample_environment(spec, host);
        SetMask const V = SetMask::from_box(host, LatticeBox::ball(O, r));
        SetMask const V2 = SetMask::from_box(host, LatticeBox::ball(O, r + 2));
        SetMask A(host);
        Philox4x32 rng(kSeed + 100 + i);
        switch (i % 4)
        {
            case 0: A.insert(host.index(O)); break;
            case 1: A = SetMask::from_box(host, LatticeBox::ball(O, 1)); break;
            case 2:
                A.insert(host.index(O));
                for (std::size_t k : SetMask::from_box(host, LatticeBox::ball(O, r - 1)).indices())
                    if (rng.uniform() < 0.3)
                        A.insert(k);
                break;
            default:
                A.insert(host.index(Coord{r - 1, 0, 0}));
                A.insert(host.index(Coord{1 - r, 1, 0}));
        }
        SetMask A2 = A.united(SetMask::from_box(host, LatticeBox::ball(O, 1)));
        A2.insert(host.index(Coord{0, r - 1, 0}));

        double const cap = capacity(env, A, V, opts);
        Field const h = harmonic_potential(env, A, V, opts);
        e_energy = std::max(e_energy, std::abs(cap - dirichlet_form(env, h, h)) / cap);

        auto const de = oracle::dense_equilibrium(env, A, V);
        double dcap = 0.0;
        for (double v : de)
            dcap += v;
        e_oracle = std::max(e_oracle, std::abs(cap - dcap) / dcap);

        SetMask point(host);
        point.insert(host.index(O));
        auto const op = PrecisionOperator::assemble(env, V);
        SpdSolver const solver(op, opts);
        double const g00 = killed_green_column(solver, host.index(O)).values[host.index(O)];
        e_point = std::max(e_point, std::abs(capacity(env, point, V, opts) * g00 - 1.0));

        VertexMeasure const e = equilibrium_measure(env, A, V, opts);
        std::vector<double> eg(host.volume(), 0.0);
        for (std::size_t a : A.indices())
        {
            Field const g = killed_green_column(solver, a);
            for (std::size_t x : V.indices())
                eg[x] += e.weights[a] * g.values[x];
        }
        for (std::size_t x : V.indices())
            e_green = std::max(e_green, std::abs(eg[x] - h.values[x]));

        double const slack = 1e-10;
        monotone = monotone && cap <= capacity(env, A2, V, opts) * (1.0 + slack);
        monotone = monotone && capacity(env, A, V2, opts) <= cap * (1.0 + slack);
        Philox4x32 bump(kSeed + 200 + i);
        std::map<std::pair<std::size_t, int>, double> extra;
        auto const stronger = Environment::from_function(
            host, env.lambda(), env.Lambda() + 1.0, spec, [&](Coord const& lower, int axis) {
                double const u = bump.uniform();
                return env.weight(lower, axis) + u;
            });
        monotone = monotone && cap <= capacity(stronger, A, V, opts) * (1.0 + slack);
    }
    bool const pass = e_energy <= 1e-8 && e_point <= 1e-8 && e_green <= 1e-8 && e_oracle <= 1e-8 && monotone;
    return {pass, "energy " + sci(e_energy) + ", point " + sci(e_point) + ", eG=h " + sci(e_green) + ", dense "
                      + sci(e_oracle) + ", monotone " + (monotone ? "yes" : "no")};
}

//---------------------------------------------------------------------------//
Outcome scaling_laws()
{
    LatticeBox const host = LatticeBox::ball(O, 5);
    SetMask const U = SetMask::from_box(host, LatticeBox::ball(O, 4));
    SetMask const A = SetMask::from_box(host, LatticeBox::ball(O, 1));
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, kSeed + 3), host);
    SolverOptions const opts = dense_opts();
    double worst = 0.0;
    for (double c : {0.5, 2.0})
    {
        auto const envc = env.scaled(c);
        auto const op = PrecisionOperator::assemble(env, U), opc = PrecisionOperator::assemble(envc, U);
        for (Coord const& y : std::vector<Coord>{O, {2, 1, 0}})
        {
            Field const g = killed_green_column(op, host.index(y), opts);
            Field const gc = killed_green_column(opc, host.index(y), opts);
            double const gmax = *std::max_element(g.values.begin(), g.values.end());
            for (std::size_t x = 0; x < g.size(); ++x)
                worst = std::max(worst, std::abs(c * gc.values[x] - g.values[x]) / gmax);
        }
        double const cap = capacity(env, A, U, opts);
        worst = std::max(worst, std::abs(capacity(envc, A, U, opts) / c - cap) / cap);
        Field const h = harmonic_potential(env, A, U, opts), hc = harmonic_potential(envc, A, U, opts);
        for (std::size_t x = 0; x < h.size(); ++x)
            worst = std::max(worst, std::abs(h.values[x] - hc.values[x]));
        auto const eta = exit_distribution(env, O, 3, opts), etac = exit_distribution(envc, O, 3, opts);
        for (std::size_t x = 0; x < eta.weights.size(); ++x)
            worst = std::max(worst, std::abs(eta.weights[x] - etac.weights[x]));
    }
    return {worst <= 1e-10, "max relative deviation " + sci(worst)};
}

//---------------------------------------------------------------------------//
Outcome capacity_slope()
{
    std::vector<double> lx, ly;
    std::string detail;
    for (int L : {2, 4, 8, 16})
    {
        LatticeBox const host = LatticeBox::ball(O, 3 * L + 1);
        auto const env = sample_environment(EnvironmentSpec::constant(1.0), host);
        double const cap = capacity(env, SetMask::from_box(host, LatticeBox::ball(O, L)),
                                    SetMask::from_box(host, LatticeBox::ball(O, 3 * L)), cg_opts(1e-10));
        lx.push_back(std::log(static_cast<double>(L)));
        ly.push_back(std::log(cap));
        detail += "Cap(B" + std::to_string(L) + ")=" + fmt("%.4g", cap) + " ";
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i] / lx.size();
        my += ly[i] / ly.size();
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    double const slope = sxy / sxx;
    return {slope >= 0.7 && slope <= 1.3, detail + "slope " + fmt("%.4f", slope)};
}

//---------------------------------------------------------------------------//
ExperimentConfig covariance_config()
{
    return parse_config({{"kind", "gff-covariance"},
                         {"N", 4},
                         {"environment", {{"law", "iid-uniform"}, {"lambda", 1.0}, {"Lambda", 3.0}, {"seed", 5}}},
                         {"mcmc", {{"samples", 100000}, {"replicas", 4}}},
                         {"seed", kSeed}});
}

Outcome sampler_covariance()
{
    auto const c = covariance_config();
    auto const art = run_experiment(c, 1);
    kept[5] = {c, bytes_of(art)};
    return {art.passed(true), "entries outside 4 SE: " + art.report.at("entries_outside").dump() + " of "
                                  + art.report.at("entries").dump() + ", max |z| "
                                  + fmt("%.3f", art.report.at("max_abs_z").get<double>())};
}

//---------------------------------------------------------------------------//
Outcome markov_decomposition()
{
    LatticeBox const host({0, 0, 0}, {8, 8, 8});
    SetMask const outer = interior_of(host);
    SetMask const inner = SetMask::from_box(host, LatticeBox({2, 2, 2}, {3, 3, 3}));
    auto const env = sample_environment(EnvironmentSpec::iid_uniform(1.0, 2.0, kSeed + 6), host);
    GffSampler sampler(env, outer, kSeed + 7);
    HarmonicExtender const ext(env, inner);
    auto const sites = inner.indices();
    std::size_t const n = sites.size(), m = 10000;
    Eigen::MatrixXd X(m, n), Y(m, n);
    for (std::size_t t = 0; t < m; ++t)
    {
        auto const dec = markov_decompose(ext, sampler.sample());
        for (std::size_t k = 0; k < n; ++k)
        {
            X(t, k) = dec.psi.values[sites[k]];
            Y(t, k) = dec.xi.values[sites[k]];
        }
    }
    Eigen::MatrixXd const Xc = X.rowwise() - X.colwise().mean();
    Eigen::MatrixXd const Yc = Y.rowwise() - Y.colwise().mean();
    auto const d = oracle::dense_precision(env, inner);
    Eigen::MatrixXd const G = oracle::dense_green(d);
    auto cov_z = [&](Eigen::MatrixXd const& a, Eigen::Index i, Eigen::MatrixXd const& b, Eigen::Index j, double target) {
        Eigen::ArrayXd const p = a.col(i).array() * b.col(j).array();
        double const mean = p.sum() / (m - 1.0);
        double const se = std::sqrt((p - p.mean()).square().sum() / (m - 1.0) / m);
        return std::abs(mean - target) / se;
    };
    double zx = 0.0, zp = 0.0;
    std::size_t bad = 0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i)
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        {
            double const z1 = cov_z(Xc, i, Yc, j, 0.0);
            zx = std::max(zx, z1);
            bad += z1 > 4.0;
            if (j >= i)
            {
                double const z2 = cov_z(Xc, i, Xc, j, G(d.pos.at(sites[i]), d.pos.at(sites[j])));
                zp = std::max(zp, z2);
                bad += z2 > 4.0;
            }
        }
    return {bad == 0, "max |z| Cov(psi,xi) " + fmt("%.3f", zx) + ", Cov(psi)-g " + fmt("%.3f", zp)};
}

//---------------------------------------------------------------------------//
ExperimentConfig wall_config(std::vector<double> center, std::vector<double> half)
{
    return parse_config({{"kind", "hardwall-prob"},
                         {"N", 2},
                         {"shape", {{"type", "box"}, {"center", center}, {"half_widths", half}}},
                         {"padding", 3.0},
                         {"environment", {{"law", "iid-uniform"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"seed", 11}}},
                         {"mcmc", {{"samples", 100000}}},
                         {"seed", kSeed}});
}

Outcome hardwall_small()
{
    struct Case
    {
        std::vector<double> center, half;
        std::size_t size;
    };
    std::vector<Case> const cases = {{{0.0, 0.0, 0.0}, {0.2, 0.2, 0.2}, 1},
                                     {{0.25, 0.0, 0.0}, {0.25, 0.2, 0.2}, 2},
                                     {{0.25, 0.25, 0.25}, {0.25, 0.25, 0.25}, 8}};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < cases.size(); ++i)
    {
        auto const c = wall_config(cases[i].center, cases[i].half);
        auto const art = run_experiment(c, 1);
        if (i == 2)
            kept[7] = {c, bytes_of(art)};
        auto const& rep = art.report;
        bool ok = rep.at("wall_size").get<std::size_t>() == cases[i].size;
        double const floor = -static_cast<double>(cases[i].size) * std::numbers::ln2;
        Estimate direct, tilted;
        for (auto const& row : rep.at("methods"))
        {
            Estimate const e{row.at("log_prob").at("value"), row.at("log_prob").at("se"), row.at("log_prob").at("n")};
            std::string const m = row.at("method");
            if (m == "direct")
                direct = e;
            else if (m == "tilted")
                tilted = e;
            else
                ok = ok && std::abs(e.value - floor) <= 1e-12;
        }
        ok = ok && std::isfinite(direct.value) && std::isfinite(tilted.value);
        ok = ok && direct.value + 4.0 * direct.se >= floor && tilted.value + 4.0 * tilted.se >= floor;
        if (cases[i].size <= 2)
        {
            double const exact = rep.at("exact");
            double const z = std::abs(direct.value - exact) / direct.se;
            ok = ok && z <= 4.0;
            detail += "|V|=" + std::to_string(cases[i].size) + ": z " + fmt("%.2f", z) + "; ";
        }
        else
        {
            double const z = std::abs(direct.value - tilted.value) / std::hypot(direct.se, tilted.se);
            ok = ok && z <= 4.0;
            detail += "2^3 wall direct " + fmt("%.4f", direct.value) + " tilted " + fmt("%.4f", tilted.value)
                      + " z " + fmt("%.2f", z);
        }
        pass = pass && ok;
    }
    return {pass, detail};
}

//---------------------------------------------------------------------------//
HardWallProblem cube_wall(int wall_r, int u_r, std::uint64_t env_seed, int N)
{
    LatticeBox const host = LatticeBox::ball(O, u_r + 1);
    auto const spec = EnvironmentSpec::iid_uniform(1.0, 2.0, env_seed);
    auto const env = sample_environment(spec, host);
    return HardWallProblem::create(env, SetMask::from_box(host, LatticeBox::ball(O, u_r)),
                                   SetMask::from_box(host, LatticeBox::ball(O, wall_r)), N,
                                   default_g_hat(spec, 3));
}

Outcome conditioned_sampler()
{
    auto const p = cube_wall(1, 3, kSeed + 8, 4);
    ChainState st = start_chain(p, kSeed + 9);
    for (int t = 0; t < 500; ++t)
        gibbs_sweep(p, st);
    std::size_t const x = p.env.host().index(Coord{1, 1, 0});
    std::size_t k = 0;
    while (p.op.active()[k] != x)
        ++k;
    double const mean = local_mean(p.env, st.field, x);
    double const sd = 1.0 / std::sqrt(p.op.diag(k));
    std::vector<double> draws;
    for (int t = 0; t < 10000; ++t)
        draws.push_back(gibbs_site_update(p, st, k));
    double const pv = ks_test(draws, [&](double v) { return truncated_normal_above_cdf(v, mean, sd, 0.0); }).p_value;

    auto const wall = p.wall.indices();
    std::size_t updates = 0, negative = 0;
    while (updates < 1000000)
    {
        gibbs_sweep(p, st);
        updates += p.op.size();
        for (std::size_t w : wall)
            negative += st.field.values[w] < 0.0;
    }
    return {pv > 0.01 && negative == 0,
            "KS p " + fmt("%.3f", pv) + ", " + std::to_string(updates) + " site updates, negative wall values "
                + std::to_string(negative)};
}

//---------------------------------------------------------------------------//
struct WallRun
{
    HardWallProblem problem;
    ChainOutput out;
};
std::optional<WallRun> wall_run;

Outcome superharmonicity()
{
    auto p = cube_wall(1, 3, kSeed + 10, 4);
    ChainOptions co;
    co.n_sweeps = 50000;
    co.seed = kSeed + 11;
    auto out = run_chain(p, co);
    auto const rep = superharmonicity_check(p, out, 4.0);
    double zw = 0.0, zo = 0.0;
    for (auto const& s : rep.sites)
    {
        if (s.on_wall)
            zw = std::max(zw, std::abs(s.diff.value) / s.diff.se);
        else
            zo = std::max(zo, std::abs(s.lhs.value) / s.lhs.se);
    }
    wall_run = WallRun{std::move(p), std::move(out)};
    return {rep.identity_pass && rep.offwall_pass,
            "post-burn-in sweeps " + std::to_string(wall_run->out.sweeps) + ", max wall |z| " + fmt("%.2f", zw)
                + ", max off-wall |z| " + fmt("%.2f", zo)};
}

Outcome brascamp_lieb()
{
    if (!wall_run)
        return {false, "criterion 9 run unavailable"};
    auto const rep = recentered_covariance_check(wall_run->problem, wall_run->out, 4.0);
    double worst = -1e300;
    for (auto const& s : rep.wall_sites)
        worst = std::max(worst, (s.variance.value - s.green) / s.variance.se);
    return {rep.brascamp_lieb_pass && !rep.wall_sites.empty(),
            std::to_string(rep.wall_sites.size()) + " wall sites, max (Var-g)/SE " + fmt("%.2f", worst)};
}

//---------------------------------------------------------------------------//
Outcome repulsion_trend()
{
    auto const c = parse_config({{"kind", "repulsion-profile"},
                                 {"ladder", {4, 6, 8}},
                                 {"shape", {{"half_width", 0.5}}},
                                 {"padding", 2.0},
                                 {"environment", {{"law", "iid-uniform"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"seed", 12}}},
                                 {"mcmc", {{"burn_in", 2000}, {"sweeps", 20000}, {"batches", 20}}},
                                 {"tolerances", {{"trend_se", 2.0}}},
                                 {"seed", kSeed}});
    auto const art = run_experiment(c, 1);
    std::string detail;
    for (auto const& row : art.report.at("rows"))
        detail += "N=" + row.at("N").dump() + " mean " + fmt("%.4f", row.at("center_mean_rb").at("value").get<double>())
                  + "+-" + fmt("%.4f", row.at("center_mean_rb").at("se").get<double>()) + " defect "
                  + fmt("%.4f", row.at("defect_rb").at("value").get<double>()) + "; ";
    bool const pass = assertion_passed(art, "center mean strictly increasing")
                      && assertion_passed(art, "harmonicity defect decreasing");
    return {pass, detail};
}

//---------------------------------------------------------------------------//
Outcome coarse_identities()
{
    auto const c = parse_config({{"kind", "coarse-diagnostics"},
                                 {"N", 8},
                                 {"shape", {{"half_width", 1.0}}},
                                 {"padding", 1.5},
                                 {"hardwall", {{"K", 2}, {"L", 1}}},
                                 {"environment", {{"law", "iid-uniform"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"seed", 13}}},
                                 {"mcmc", {{"burn_in", 500}, {"sweeps", 2000}, {"samples", 200}, {"replicas", 2}}},
                                 {"seed", kSeed}});
    auto const art = run_experiment(c, 1);
    auto const& r = art.report;
    bool const pass = art.passed(false) && assertion_passed(art, "sup over selectors equals per-box max");
    return {pass, "boxes " + r.at("selected_boxes").dump() + ", nu mass - 1 = "
                      + sci(r.at("nu_mass").get<double>() - 1.0) + ", enumeration gap "
                      + sci(r.at("max_enum_gap").get<double>()) + ", good-box violations "
                      + r.at("good_box_violations").dump() + " over " + r.at("samples").dump() + " samples"};
}

//---------------------------------------------------------------------------//
Outcome solidification_trend()
{
    auto const c = parse_config({{"kind", "solidification"},
                                 {"ladder", {8, 16}},
                                 {"shape", {{"half_width", 1.0}}},
                                 {"padding", 2.0},
                                 {"hardwall", {{"K", 2}, {"L", 1}, {"rho", 0.5}, {"eps", 0.5}}},
                                 {"environment", {{"law", "iid-uniform"}, {"lambda", 1.0}, {"Lambda", 2.0}, {"seed", 14}}},
                                 {"mcmc", {{"replicas", 5}}},
                                 {"seed", kSeed}});
    auto const art = run_experiment(c, 1);
    std::string detail;
    for (auto const& row : art.report.at("rows"))
        detail += "(N=" + row.at("N").dump() + " r=" + row.at("replica").dump() + " esc "
                  + fmt("%.3f", row.at("sup_escape").get<double>()) + " ratio "
                  + fmt("%.3f", row.at("ratio").get<double>()) + ") ";
    return {art.passed(true), detail};
}

//---------------------------------------------------------------------------//
Outcome gbar_identity()
{
    double worst = 0.0;
    for (double lambda : {0.5, 1.0, 2.0})
        worst = std::max(worst, gbar_identity_check(lambda, 2.0 * lambda, 3, 4).rel_error);
    auto const spec = EnvironmentSpec::iid_two_point(1.0, 3.0, 0.5, kSeed + 15);
    auto const g = gbar_estimate(spec, 3, 4, 20, kSeed + 16);
    bool nondecreasing = true;
    for (std::size_t i = 1; i < g.running_max.size(); ++i)
        nondecreasing = nondecreasing && g.running_max[i] >= g.running_max[i - 1];
    double const bound = ball_green_diagonal(EnvironmentSpec::constant(1.0), 3, 4);
    bool const bounded = g.max <= bound + 1e-10;
    return {worst <= 1e-10 && nondecreasing && bounded,
            "identity rel error " + sci(worst) + ", max proxy " + fmt("%.6f", g.max) + " <= "
                + fmt("%.6f", bound)};
}

//---------------------------------------------------------------------------//
Outcome homogenization_trends()
{
    bool pass = true;
    std::string detail;
    for (auto const& spec : {EnvironmentSpec::constant(1.0), EnvironmentSpec::iid_uniform(1.0, 2.0, kSeed + 17)})
    {
        ScalingStudy st;
        st.env = spec;
        st.shape = Shape::cube(3, 1.0);
        st.ladder = {4, 8, 16};
        st.padding = 4.0;
        auto const res = capacity_scaling(st, cg_opts(1e-10));
        bool const cauchy = std::abs(res.rows[2].value - res.rows[1].value)
                            < std::abs(res.rows[1].value - res.rows[0].value);
        pass = pass && cauchy;
        detail += to_string(spec.law) + " a=" + fmt("%.4f", res.rows[0].value) + "," + fmt("%.4f", res.rows[1].value)
                  + "," + fmt("%.4f", res.rows[2].value) + "; ";
    }
    auto const rows = potential_convergence({EnvironmentSpec::constant(1.0)}, 1.0, 3, {8, 16}, 4.0, cg_opts(1e-10));
    bool const shrink = rows[1].comparator_gap < rows[0].comparator_gap;
    detail += "comparator gap " + fmt("%.4f", rows[0].comparator_gap) + " -> " + fmt("%.4f", rows[1].comparator_gap);
    return {pass && shrink, detail};
}

//---------------------------------------------------------------------------//
Outcome reproducibility()
{
    bool pass = !kept.empty();
    std::string detail;
    for (auto const& [id, k] : kept)
    {
        bool const same = bytes_of(run_experiment(k.config, 2)) == k.bytes;
        pass = pass && same;
        detail += "criterion " + std::to_string(id) + " workers 1 vs 2: " + (same ? "identical" : "DIFFERENT") + "; ";
    }
    return {pass, detail};
}

}  // namespace

int main()
{
    struct Criterion
    {
        int id;
        char const* title;
        double budget;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria = {
        {1, "dense-oracle equivalence", 60, dense_oracle},
        {2, "potential-theory identities", 120, potential_identities},
        {3, "conductance scaling laws", 30, scaling_laws},
        {4, "capacity growth exponent", 120, capacity_slope},
        {5, "sampler covariance", 120, sampler_covariance},
        {6, "Markov decomposition", 120, markov_decomposition},
        {7, "hard-wall exact small cases", 300, hardwall_small},
        {8, "conditioned-sampler correctness", 300, conditioned_sampler},
        {9, "superharmonicity identity", 600, superharmonicity},
        {10, "repulsion trend", 900, repulsion_trend},
        {11, "Brascamp-Lieb direction", 60, brascamp_lieb},
        {12, "coarse-graining identities", 300, coarse_identities},
        {13, "solidification trend", 600, solidification_trend},
        {14, "gbar identity", 120, gbar_identity},
        {15, "homogenization trends", 900, homogenization_trends},
        {16, "reproducibility across worker counts", 600, reproducibility},
    };
    int failed = 0;
    for (auto const& c : criteria)
    {
        auto const t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool const in_time = secs < c.budget;
        bool const pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s criterion %d (%s) [%.1f s / %.0f s%s]: %s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    c.budget, in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
