// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/hardwall.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

namespace hwgff {

namespace {

constexpr char kChainMagic[8] = {'H', 'W', 'G', 'F', 'C', 'H', 'K', '1'};

template <class T>
void put(std::ostream& os, T const& v)
{
    os.write(reinterpret_cast<char const*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw HardWallError("read_checkpoint: truncated stream");
    return v;
}

/// Batch-means estimate of sum_i c_i mean(q_i).
Estimate linear_estimate(BatchMeans const& bm, std::initializer_list<std::pair<std::size_t, double>> terms)
{
    RunningStats rs;
    std::size_t const nb = bm.samples() / bm.batch_size();
    for (std::size_t b = 0; b < nb; ++b)
    {
        double v = 0.0;
        for (auto const& [q, c] : terms)
            v += c * bm.batch_mean(b, q);
        rs.add(v);
    }
    return {rs.mean(), rs.sem(), bm.samples()};
}

/// Jackknife over batches of f(mean(q0), mean(q1), mean(q2)).
template <class F>
Estimate jackknife3(BatchMeans const& bm, std::size_t q0, std::size_t q1, std::size_t q2, F&& f)
{
    std::size_t const nb = bm.n_batches();
    double full[3] = {0.0, 0.0, 0.0};
    std::size_t const qs[3] = {q0, q1, q2};
    for (std::size_t b = 0; b < nb; ++b)
        for (int i = 0; i < 3; ++i)
            full[i] += bm.batch_mean(b, qs[i]);
    double const theta = f(full[0] / nb, full[1] / nb, full[2] / nb);
    std::vector<double> partial(nb);
    double avg = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
    {
        double loo[3];
        for (int i = 0; i < 3; ++i)
            loo[i] = (full[i] - bm.batch_mean(b, qs[i])) / static_cast<double>(nb - 1);
        partial[b] = f(loo[0], loo[1], loo[2]);
        avg += partial[b] / static_cast<double>(nb);
    }
    double var = 0.0;
    for (double v : partial)
        var += (v - avg) * (v - avg);
    var *= static_cast<double>(nb - 1) / static_cast<double>(nb);
    return {theta, std::sqrt(var), bm.samples()};
}

double conditional_mean_local(HardWallProblem const& p, Field const& phi, std::size_t k)
{
    double s = 0.0;
    for (int j = 0; j < p.op.degree(); ++j)
        s += p.op.neighbor_weight(k, j) * phi.values[p.op.neighbor_host(k, j)];
    return s / p.op.diag(k);
}

SetMask wall_interior(SetMask const& wall)
{
    SetMask inner = wall.minus(wall.internal_boundary());
    return inner.empty() ? wall : inner;
}

}  // namespace

double repulsion_level(double g_hat, int N)
{
    if (N < 2)
        return 0.0;
    return std::sqrt(4.0 * g_hat * std::log(static_cast<double>(N)));
}

HardWallProblem HardWallProblem::create(Environment env, SetMask U, SetMask wall, int N,
                                        double g_hat)
{
    if (!(U.box() == env.host()) || !(wall.box() == env.host()))
        throw HardWallError("HardWallProblem: masks must be defined on the environment host");
    if (!wall.subset_of(U))
        throw HardWallError("HardWallProblem: wall set is not contained in U");
    if (!(g_hat > 0.0))
        throw HardWallError("HardWallProblem: g_hat must be positive");
    HardWallProblem p;
    p.op = PrecisionOperator::assemble(env, U);
    p.env = std::move(env);
    p.U = std::move(U);
    p.wall = std::move(wall);
    p.N = N;
    p.g_hat = g_hat;
    p.on_wall.resize(p.op.size());
    for (std::size_t k = 0; k < p.op.size(); ++k)
        p.on_wall[k] = p.wall.contains(p.op.active()[k]) ? 1 : 0;
    return p;
}

double local_mean(Environment const& env, Field const& phi, std::size_t x)
{
    LatticeBox const& host = env.host();
    Coord const cx = host.coord(x);
    double s = 0.0;
    double mu = 0.0;
    for (int a = 0; a < host.dim(); ++a)
    {
        for (int sign : {-1, 1})
        {
            Coord y = cx;
            y[a] += sign;
            double const w = sign < 0 ? env.down(x, a) : env.up(x, a);
            mu += w;
            if (phi.box.contains(y))
                s += w * phi.values[phi.box.index(y)];
        }
    }
    return s / mu;
}

//---------------------------------------------------------------------------//
ChainState start_chain(HardWallProblem const& problem, std::uint64_t seed,
                       std::optional<Field> start)
{
    ChainState st;
    st.rng = Philox4x32(seed);
    if (start)
    {
        if (!(start->box == problem.env.host()))
            throw HardWallError("start_chain: start field must be aligned with the host");
        st.field = *start;
        for (std::size_t i = 0; i < st.field.size(); ++i)
        {
            if (!problem.U.contains(i))
                st.field.values[i] = 0.0;
            else if (problem.wall.contains(i))
                st.field.values[i] = std::max(st.field.values[i], 0.0);
        }
    }
    else
    {
        st.field = harmonic_potential(problem.env, problem.wall, problem.U);
        double const a = problem.alpha();
        for (double& v : st.field.values)
            v *= a;
    }
    st.field.tag = FieldTag::generic;
    return st;
}

double gibbs_site_update(HardWallProblem const& problem, ChainState& state, std::size_t k)
{
    double const m = conditional_mean_local(problem, state.field, k);
    double const sd = 1.0 / std::sqrt(problem.op.diag(k));
    double v;
    if (problem.on_wall[k])
        v = truncated_normal_above(state.rng, m, sd, 0.0);
    else
        v = m + sd * standard_normal(state.rng);
    state.field.values[problem.op.active()[k]] = v;
    return v;
}

void gibbs_sweep(HardWallProblem const& problem, ChainState& state)
{
    for (std::size_t k = 0; k < problem.op.size(); ++k)
        gibbs_site_update(problem, state, k);
    ++state.sweeps;
}

void write_checkpoint(std::ostream& os, ChainState const& state)
{
    os.write(kChainMagic, sizeof(kChainMagic));
    put<std::uint64_t>(os, state.sweeps);
    auto const& rs = state.rng.state();
    put<std::uint64_t>(os, rs.key);
    put<std::uint64_t>(os, rs.counter_lo);
    put<std::uint64_t>(os, rs.counter_hi);
    put<std::uint32_t>(os, rs.position);
    write_field_binary(os, state.field);
}

ChainState read_checkpoint(std::istream& is)
{
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kChainMagic, sizeof(magic)) != 0)
        throw HardWallError("read_checkpoint: bad magic");
    ChainState st;
    st.sweeps = get<std::uint64_t>(is);
    Philox4x32::State rs;
    rs.key = get<std::uint64_t>(is);
    rs.counter_lo = get<std::uint64_t>(is);
    rs.counter_hi = get<std::uint64_t>(is);
    rs.position = get<std::uint32_t>(is);
    st.rng.set_state(rs);
    st.field = read_field_binary(is);
    return st;
}

//---------------------------------------------------------------------------//
std::size_t default_burn_in(SetMask const& U)
{
    double const side = std::pow(static_cast<double>(U.count()), 1.0 / U.box().dim());
    return static_cast<std::size_t>(std::ceil(50.0 * side));
}

Field ChainOutput::mean_field(HardWallProblem const& problem) const
{
    Field f(problem.env.host(), FieldTag::conditioned_mean, 0.0);
    for (std::size_t k = 0; k < mean.size(); ++k)
        f.values[problem.op.active()[k]] = mean[k].value;
    return f;
}

Field ChainOutput::se_field(HardWallProblem const& problem) const
{
    Field f(problem.env.host(), FieldTag::generic, 0.0);
    for (std::size_t k = 0; k < mean.size(); ++k)
        f.values[problem.op.active()[k]] = mean[k].se;
    return f;
}

ChainOutput run_chain(HardWallProblem const& problem, ChainOptions const& opts)
{
    if (opts.n_batches < 20)
        throw HardWallError("run_chain: batch means need at least 20 batches");
    std::size_t const every = std::max<std::size_t>(1, opts.record_every);
    std::size_t const n_rec = opts.n_sweeps / every;
    std::size_t const batch_size = n_rec / opts.n_batches;
    if (batch_size < 1)
        throw HardWallError("run_chain: too few sweeps for " + std::to_string(opts.n_batches)
                            + " batches");

    std::size_t const n = problem.op.size();
    std::size_t const np = opts.pairs.size();
    std::vector<std::pair<std::size_t, std::size_t>> pair_local;
    for (auto const& [x, y] : opts.pairs)
    {
        auto const kx = problem.op.local(x);
        auto const ky = problem.op.local(y);
        if (kx < 0 || ky < 0)
            throw HardWallError("run_chain: recorded pair outside U");
        pair_local.emplace_back(static_cast<std::size_t>(kx), static_cast<std::size_t>(ky));
    }

    ChainOutput out;
    out.burn_in = opts.burn_in > 0 ? opts.burn_in : default_burn_in(problem.U);
    out.pairs = opts.pairs;
    ChainState st = start_chain(problem, opts.seed, opts.start);

    auto check_wall = [&] {
        for (std::size_t k = 0; k < n; ++k)
            if (problem.on_wall[k] && !(st.field.values[problem.op.active()[k]] >= 0.0))
                out.nonnegative = false;
    };

    for (std::size_t s = 0; s < out.burn_in; ++s)
    {
        gibbs_sweep(problem, st);
        check_wall();
    }

    BatchMeans bm(4 * n + np, opts.n_batches, batch_size);
    std::vector<double> q(4 * n + np);
    std::vector<double> inv_sqrt_mu(n);
    for (std::size_t k = 0; k < n; ++k)
        inv_sqrt_mu[k] = 1.0 / std::sqrt(problem.op.diag(k));
    out.trace.reserve(n_rec);

    for (std::size_t s = 1; s <= n_rec * every; ++s)
    {
        gibbs_sweep(problem, st);
        check_wall();
        if (s % every != 0)
            continue;
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            double const phi = st.field.values[problem.op.active()[k]];
            double const m = conditional_mean_local(problem, st.field, k);
            sum += phi;
            q[k] = phi;
            q[n + k] = phi * phi;
            q[2 * n + k] = phi - m;
            q[3 * n + k] = problem.on_wall[k]
                               ? inv_sqrt_mu[k] * inverse_mills_lower(m / inv_sqrt_mu[k])
                               : 0.0;
        }
        for (std::size_t i = 0; i < np; ++i)
            q[4 * n + i] = st.field.values[problem.op.active()[pair_local[i].first]]
                           * st.field.values[problem.op.active()[pair_local[i].second]];
        bm.add(q);
        out.trace.push_back(sum);
    }
    out.sweeps = st.sweeps;
    out.samples = bm.samples();
    out.site_updates = st.sweeps * n;

    out.mean.resize(n);
    out.mean_rb.resize(n);
    out.variance.resize(n);
    out.lhs.resize(n);
    out.rhs.resize(n);
    out.lhs_minus_rhs.resize(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        out.mean[k] = bm.estimate(k);
        out.lhs[k] = bm.estimate(2 * n + k);
        out.rhs[k] = bm.estimate(3 * n + k);
        out.lhs_minus_rhs[k] = bm.difference(2 * n + k, 3 * n + k);
        out.mean_rb[k] = linear_estimate(bm, {{k, 1.0}, {2 * n + k, -1.0}, {3 * n + k, 1.0}});
        out.variance[k] = jackknife3(bm, k, n + k, n + k,
                                     [](double m1, double m2, double) { return m2 - m1 * m1; });
    }
    for (std::size_t i = 0; i < np; ++i)
    {
        auto const [kx, ky] = pair_local[i];
        out.pair_cov.push_back(jackknife3(bm, 4 * n + i, kx, ky, [](double pxy, double mx, double my) {
            return pxy - mx * my;
        }));
    }
    out.gate = geweke_gate(out.trace);
    return out;
}

//---------------------------------------------------------------------------//
SuperharmonicityReport superharmonicity_check(HardWallProblem const& problem,
                                              ChainOutput const& out, double k_se)
{
    SuperharmonicityReport rep;
    rep.k_se = k_se;
    for (std::size_t k = 0; k < problem.op.size(); ++k)
    {
        SuperharmonicityReport::Site s;
        s.index = problem.op.active()[k];
        s.on_wall = problem.on_wall[k] != 0;
        s.lhs = out.lhs[k];
        s.rhs = out.rhs[k];
        s.diff = out.lhs_minus_rhs[k];
        if (s.on_wall)
        {
            s.pass = std::abs(s.diff.value) <= k_se * s.diff.se;
            rep.identity_pass = rep.identity_pass && s.pass;
            if (s.lhs.value < -k_se * s.lhs.se)
                rep.superharmonic = false;
        }
        else
        {
            s.pass = std::abs(s.lhs.value) <= k_se * s.lhs.se;
            rep.offwall_pass = rep.offwall_pass && s.pass;
        }
        rep.sites.push_back(s);
    }
    return rep;
}

Field make_tilt(HardWallProblem const& problem, SetMask const& B, SolverOptions opts)
{
    if (!problem.wall.subset_of(B) || !B.subset_of(problem.U))
        throw HardWallError("make_tilt: need wall subset of B subset of U");
    Field f = harmonic_potential(problem.env, problem.wall, B, opts);
    double const a = problem.alpha();
    for (double& v : f.values)
        v *= a;
    f.tag = FieldTag::generic;
    return f;
}

std::string to_string(LogProbMethod m)
{
    switch (m)
    {
        case LogProbMethod::direct: return "direct";
        case LogProbMethod::tilted: return "tilted";
        case LogProbMethod::fkg_bound: return "fkg-bound";
    }
    return "direct";
}

LogProbMethod logprob_method_from_string(std::string const& s)
{
    for (auto m : {LogProbMethod::direct, LogProbMethod::tilted, LogProbMethod::fkg_bound})
        if (to_string(m) == s)
            return m;
    throw HardWallError("unknown log-probability method '" + s + "'");
}

LogProbResult hardwall_logprob(HardWallProblem const& problem, LogProbMethod method,
                               std::size_t n, std::uint64_t seed)
{
    LogProbResult res;
    res.method = method;
    double const floor = -static_cast<double>(problem.wall_size()) * std::numbers::ln2;
    if (method == LogProbMethod::fkg_bound)
    {
        res.log_prob = {floor, 0.0, 0};
        return res;
    }
    if (n < 2)
        throw HardWallError("hardwall_logprob: need at least 2 samples");

    GffSampler sampler(problem.op, seed);
    std::size_t const m = problem.op.size();
    std::vector<std::size_t> wall_local;
    for (std::size_t k = 0; k < m; ++k)
        if (problem.on_wall[k])
            wall_local.push_back(k);
    std::vector<double> phi(m);

    if (method == LogProbMethod::direct)
    {
        for (std::size_t s = 0; s < n; ++s)
        {
            sampler.sample_local(phi);
            bool hit = true;
            for (std::size_t k : wall_local)
                hit = hit && phi[k] >= 0.0;
            res.hits += hit ? 1 : 0;
        }
        if (res.hits == 0)
            throw HardWallError("hardwall_logprob(direct): no sample hit the wall event");
        double const p = static_cast<double>(res.hits) / static_cast<double>(n);
        res.log_prob = {std::log(p), std::sqrt((1.0 - p) / (static_cast<double>(n) * p)), n};
        res.ess = static_cast<double>(n);
        return res;
    }

    Field const tilt = problem.tilt ? *problem.tilt : make_tilt(problem, problem.U);
    if (!(tilt.box == problem.env.host()))
        throw HardWallError("hardwall_logprob: tilt must be aligned with the host");
    for (std::size_t i = 0; i < tilt.size(); ++i)
        if (!problem.U.contains(i) && tilt.values[i] != 0.0)
            throw HardWallError("hardwall_logprob: tilt must vanish off U");
    std::vector<double> const f = problem.op.to_local(tilt.values);
    std::vector<double> qf(m);
    problem.op.apply(f, qf);
    double energy = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        energy += f[k] * qf[k];
    res.tilt_energy = energy;

    RunningStats lw;
    std::vector<double> logs;
    logs.reserve(n);
    for (std::size_t s = 0; s < n; ++s)
    {
        sampler.sample_local(phi);
        double cross = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            cross += qf[k] * phi[k];
        double const l = -cross - 0.5 * energy;
        lw.add(l);
        bool hit = true;
        for (std::size_t k : wall_local)
            hit = hit && phi[k] + f[k] >= 0.0;
        if (hit)
            logs.push_back(l);
    }
    res.mean_log_weight = lw.estimate();
    res.hits = logs.size();
    if (logs.empty())
        throw HardWallError("hardwall_logprob(tilted): no sample hit the shifted wall event");
    double const top = *std::max_element(logs.begin(), logs.end());
    double s1 = 0.0, s2 = 0.0;
    for (double l : logs)
    {
        double const w = std::exp(l - top);
        s1 += w;
        s2 += w * w;
    }
    double const dn = static_cast<double>(n);
    res.ess = s1 * s1 / s2;
    if (res.ess < 50.0)
        throw HardWallError("hardwall_logprob(tilted): effective sample size "
                            + std::to_string(res.ess) + " below 50");
    double const mean = s1 / dn;
    double const var = std::max(0.0, (s2 / dn - mean * mean) * dn / (dn - 1.0));
    res.log_prob = {top + std::log(mean), std::sqrt(var / dn) / mean, n};
    return res;
}

//---------------------------------------------------------------------------//
RepulsionProfile repulsion_profile_report(HardWallProblem const& problem, ChainOutput const& out,
                                          SolverOptions opts)
{
    RepulsionProfile rep;
    rep.alpha = problem.alpha();
    Field const h = harmonic_potential(problem.env, problem.wall, problem.U, opts);
    LatticeBox const& host = problem.env.host();
    int const d = host.dim();

    std::vector<double> centroid(d, 0.0);
    auto const wall_idx = problem.wall.indices();
    for (std::size_t idx : wall_idx)
        for (int a = 0; a < d; ++a)
            centroid[a] += host.coord(idx, a) / static_cast<double>(wall_idx.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t idx : wall_idx)
    {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a)
            r2 += (host.coord(idx, a) - centroid[a]) * (host.coord(idx, a) - centroid[a]);
        if (r2 < best - 1e-12)
        {
            best = r2;
            rep.center = idx;
        }
    }

    SetMask const inner = wall_interior(problem.wall);
    SetMask const rim = problem.U.internal_boundary();
    rep.defect = {-1.0, 0.0, out.samples};
    rep.defect_rb = {-1.0, 0.0, out.samples};
    rep.far_field = {-std::numeric_limits<double>::infinity(), 0.0, out.samples};
    for (std::size_t k = 0; k < problem.op.size(); ++k)
    {
        std::size_t const idx = problem.op.active()[k];
        ProfileRow row;
        row.index = idx;
        row.mean = out.mean[k];
        row.h = h.values[idx];
        row.ratio = rep.alpha * row.h > 0.0 ? row.mean.value / (rep.alpha * row.h) : 0.0;
        rep.rows.push_back(row);
        if (idx == rep.center)
        {
            rep.center_mean = out.mean[k];
            rep.center_mean_rb = out.mean_rb[k];
            rep.center_ratio = row.ratio;
        }
        if (inner.contains(idx))
        {
            if (std::abs(out.lhs[k].value) > rep.defect.value)
                rep.defect = {std::abs(out.lhs[k].value), out.lhs[k].se, out.samples};
            if (out.rhs[k].value > rep.defect_rb.value)
                rep.defect_rb = out.rhs[k];
        }
        if (rim.contains(idx) && out.mean[k].value > rep.far_field.value)
        {
            rep.far_field = out.mean[k];
            rep.far_field_h = rep.alpha * row.h;
        }
    }
    return rep;
}

CovarianceReport recentered_covariance_check(HardWallProblem const& problem,
                                             ChainOutput const& out, double k_se,
                                             SolverOptions opts)
{
    CovarianceReport rep;
    SpdSolver const solver(problem.op, opts);
    auto green = [&](std::size_t x, std::size_t y) {
        return killed_green_column(solver, y).values[x];
    };
    for (std::size_t i = 0; i < out.pairs.size(); ++i)
    {
        CovarianceReport::Pair p;
        p.x = out.pairs[i].first;
        p.y = out.pairs[i].second;
        p.cov = out.pair_cov[i];
        p.green = green(p.x, p.y);
        p.gap = {p.cov.value - p.green, p.cov.se, p.cov.n};
        rep.pairs.push_back(p);
    }
    for (std::size_t k = 0; k < problem.op.size(); ++k)
    {
        if (!problem.on_wall[k])
            continue;
        CovarianceReport::Site s;
        s.index = problem.op.active()[k];
        s.variance = out.variance[k];
        s.green = green(s.index, s.index);
        s.pass = s.variance.value <= s.green + k_se * s.variance.se;
        rep.brascamp_lieb_pass = rep.brascamp_lieb_pass && s.pass;
        rep.wall_sites.push_back(s);
    }
    return rep;
}

RegularityReport regularity_check(HardWallProblem const& problem, ChainOutput const& out)
{
    RegularityReport rep;
    rep.alpha = problem.alpha();
    rep.max_gap = {-1.0, 0.0, out.samples};
    SetMask const inner = wall_interior(problem.wall);
    LatticeBox const& host = problem.env.host();
    for (std::size_t x : inner.indices())
    {
        auto const kx = static_cast<std::size_t>(problem.op.local(x));
        for (int a = 0; a < host.dim(); ++a)
        {
            auto const y = host.neighbor(x, a, 1);
            if (y < 0 || !inner.contains(static_cast<std::size_t>(y)))
                continue;
            auto const ky = static_cast<std::size_t>(problem.op.local(static_cast<std::size_t>(y)));
            double const gap = std::abs(out.mean_rb[kx].value - out.mean_rb[ky].value);
            if (gap > rep.max_gap.value)
            {
                rep.max_gap = {gap, std::hypot(out.mean_rb[kx].se, out.mean_rb[ky].se), out.samples};
                rep.x = x;
                rep.y = static_cast<std::size_t>(y);
            }
        }
    }
    if (rep.max_gap.value < 0.0)
        rep.max_gap.value = 0.0;
    rep.below_alpha = rep.alpha <= 0.0 || rep.max_gap.value <= rep.alpha;
    return rep;
}

}  // namespace hwgff
