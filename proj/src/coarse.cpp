// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hwgff {

namespace {

bool divisible(int c, int s)
{
    return ((c % s) + s) % s == 0;
}

}  // namespace

int coarse_scale(int N, int d)
{
    if (N < 3)
        throw CoarseError("coarse_scale: need N >= 3 so that log N > 1");
    double const n = static_cast<double>(N);
    return static_cast<int>(std::ceil(std::pow(n, 2.0 / d) / std::pow(std::log(n), 1.0 / (2.0 * d))));
}

double good_level(double delta, double g_hat)
{
    return 4.0 * delta * g_hat;
}

SetMask CoarseGrid::union_of_boxes(std::vector<std::size_t> const& selection) const
{
    SetMask s(host);
    for (std::size_t i : selection)
    {
        LatticeBox const& b = B.at(i);
        for (std::size_t j = 0; j < b.volume(); ++j)
            s.insert(host.index(b.coord(j)));
    }
    return s;
}

std::vector<std::size_t> CoarseGrid::all() const
{
    std::vector<std::size_t> v(points.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = i;
    return v;
}

CoarseGrid build_grid(SetMask const& VN, int N, int K, std::optional<int> override_L)
{
    if (K < 2)
        throw CoarseError("build_grid: K must be >= 2");
    CoarseGrid g;
    g.N = N;
    g.K = K;
    g.host = VN.box();
    int const d = g.host.dim();
    g.L = override_L ? *override_L : coarse_scale(N, d);
    if (g.L < 1)
        throw CoarseError("build_grid: L must be >= 1");
    int const s = g.spacing();
    for (std::size_t idx : VN.indices())
    {
        Coord const x = g.host.coord(idx);
        if (std::all_of(x.begin(), x.end(), [&](int c) { return divisible(c, s); }))
            g.points.push_back(x);
    }
    if (g.points.empty())
        throw CoarseError("build_grid: V_N contains no point of the coarse grid");
    for (Coord const& z : g.points)
    {
        Coord bc(d), uc(d), bs(d, 2 * g.L), us(d, 2 * g.K * g.L);
        for (int i = 0; i < d; ++i)
        {
            bc[i] = z[i] - g.L;
            uc[i] = z[i] - g.K * g.L;
        }
        g.B.emplace_back(bc, bs);
        g.U.emplace_back(uc, us);
    }
    return g;
}

//---------------------------------------------------------------------------//
VertexMeasure nu_coefficients(Environment const& env, CoarseGrid const& grid,
                              std::vector<std::size_t> const& selection, SetMask const& V,
                              SolverOptions opts)
{
    if (selection.empty())
        throw CoarseError("nu_coefficients: empty selection");
    SetMask const S = grid.union_of_boxes(selection);
    VertexMeasure const e = equilibrium_measure(env, S, V, opts);
    VertexMeasure nu;
    nu.support = SetMask(grid.host);
    nu.weights.assign(grid.host.volume(), 0.0);
    for (std::size_t i : selection)
    {
        LatticeBox const& b = grid.B[i];
        double mass = 0.0;
        for (std::size_t j = 0; j < b.volume(); ++j)
            mass += e.weights[grid.host.index(b.coord(j))];
        std::size_t const zi = grid.host.index(grid.points[i]);
        nu.support.insert(zi);
        nu.weights[zi] = mass / e.total;
    }
    nu.refresh_total();
    return nu;
}

//---------------------------------------------------------------------------//
CoarseFunctionals::CoarseFunctionals(Environment const& env, CoarseGrid const& grid,
                                     std::vector<std::size_t> selection, std::vector<double> nu,
                                     SolverOptions opts)
    : env_(env)
    , grid_(std::make_shared<CoarseGrid const>(grid))
    , selection_(std::move(selection))
    , nu_(std::move(nu))
{
    if (nu_.size() != selection_.size())
        throw CoarseError("CoarseFunctionals: one coefficient per selected box required");
    if (!(grid.host == env.host()))
        throw CoarseError("CoarseFunctionals: grid and environment hosts differ");
    for (std::size_t i : selection_)
    {
        ext_.push_back(std::make_shared<HarmonicExtender const>(env, grid.local_mask(i), opts));
        LatticeBox const& b = grid.B.at(i);
        std::vector<std::size_t> idx(b.volume());
        for (std::size_t j = 0; j < b.volume(); ++j)
            idx[j] = grid.host.index(b.coord(j));
        box_index_.push_back(std::move(idx));
    }
    xi_.resize(size());
    psi_.resize(size());
    phi_.resize(size());
}

void CoarseFunctionals::load(Field const& phi)
{
    if (!(phi.box == env_.host()))
        throw CoarseError("CoarseFunctionals::load: field must be aligned with the host");
    loaded_ = phi;
    for (std::size_t k = 0; k < size(); ++k)
    {
        auto const& op = ext_[k]->op();
        auto const x = ext_[k]->extend_local(phi.values);
        auto const& idx = box_index_[k];
        xi_[k].resize(idx.size());
        psi_[k].resize(idx.size());
        phi_[k].resize(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
        {
            double const xv = x[static_cast<std::size_t>(op.local(idx[j]))];
            xi_[k][j] = xv;
            phi_[k][j] = phi.values[idx[j]];
            psi_[k][j] = phi.values[idx[j]] - xv;
        }
    }
}

double CoarseFunctionals::z_f(Selector const& f) const
{
    if (f.size() != size())
        throw CoarseError("z_f: selector must have one point per selected box");
    double z = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
    {
        LatticeBox const& b = grid_->B[selection_[k]];
        if (!b.contains(f[k]))
            throw CoarseError("z_f: selector out of box");
        z += nu_[k] * xi_[k][b.index(f[k])];
    }
    return z;
}

double CoarseFunctionals::z_f_beta_b(Selector const& f, double beta, double b,
                                     VertexMeasure const& eta) const
{
    if (!(b > 0.0) || beta < 0.0)
        throw CoarseError("z_f_beta_b: need b > 0 and beta >= 0");
    double pairing = 0.0;
    if (beta > 0.0)
    {
        if (eta.weights.size() != loaded_.values.size())
            throw CoarseError("z_f_beta_b: exit law must be aligned with the host");
        for (std::size_t i = 0; i < eta.weights.size(); ++i)
            pairing += loaded_.values[i] * eta.weights[i];
    }
    return b * z_f(f) - beta * pairing;
}

double CoarseFunctionals::z_sup() const
{
    double z = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
        z += nu_[k] * *std::max_element(xi_[k].begin(), xi_[k].end());
    return z;
}

double CoarseFunctionals::z_sup_enumerated(std::size_t max_selectors) const
{
    double total = 1.0;
    for (std::size_t k = 0; k < size(); ++k)
        total *= static_cast<double>(xi_[k].size());
    if (total > static_cast<double>(max_selectors))
        throw CoarseError("z_sup_enumerated: selector family too large to enumerate");
    std::vector<std::size_t> pos(size(), 0);
    Selector f(size());
    double best = -std::numeric_limits<double>::infinity();
    while (true)
    {
        for (std::size_t k = 0; k < size(); ++k)
            f[k] = grid_->B[selection_[k]].coord(pos[k]);
        best = std::max(best, z_f(f));
        std::size_t k = 0;
        while (k < size() && ++pos[k] == xi_[k].size())
        {
            pos[k] = 0;
            ++k;
        }
        if (k == size())
            break;
    }
    return best;
}

std::vector<Coord> box_points(LatticeBox const& b)
{
    std::vector<Coord> pts(b.volume());
    for (std::size_t j = 0; j < b.volume(); ++j)
        pts[j] = b.coord(j);
    return pts;
}

//---------------------------------------------------------------------------//
Classification classify_boxes(CoarseFunctionals const& cf, double a, int N)
{
    if (a < 0.0)
        throw CoarseError("classify_boxes: level a must be nonnegative");
    Classification c;
    c.level = N >= 2 ? std::sqrt(a * std::log(static_cast<double>(N))) : 0.0;
    c.good.resize(cf.size());
    for (std::size_t k = 0; k < cf.size(); ++k)
    {
        double const m = *std::min_element(cf.psi(k).begin(), cf.psi(k).end());
        c.good[k] = m <= -c.level ? 1 : 0;
        c.n_good += c.good[k];
    }
    return c;
}

int default_window(CoarseGrid const& grid)
{
    double const n = static_cast<double>(grid.N);
    double const lh = n / std::pow(std::log(n), 1.0 / (4.0 * grid.host.dim()));
    int const s = grid.spacing();
    int const m = std::max(1, static_cast<int>(std::lround(lh / s)));
    return m * s;
}

CoveringResult covering_check(CoarseGrid const& grid, std::vector<std::uint8_t> const& in_selection,
                              double rho, int L_hat, SetMask const& centers)
{
    if (!(rho >= 0.0 && rho < 1.0))
        throw CoarseError("covering_check: rho must lie in [0, 1)");
    if (L_hat < 1)
        throw CoarseError("covering_check: window half-width must be positive");
    if (in_selection.size() != grid.size())
        throw CoarseError("covering_check: selection flags must cover C_N");
    CoveringResult res;
    res.L_hat = L_hat;
    LatticeBox const& cb = centers.box();
    for (std::size_t idx : centers.indices())
    {
        Coord const x = cb.coord(idx);
        if (!std::all_of(x.begin(), x.end(), [&](int c) { return divisible(c, L_hat); }))
            continue;
        WindowRow row;
        row.center = x;
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            bool inside = true;
            for (std::size_t a = 0; a < x.size(); ++a)
                inside = inside && std::abs(grid.points[i][a] - x[a]) <= L_hat;
            if (!inside)
                continue;
            ++row.in_grid;
            row.in_selection += in_selection[i];
        }
        row.pass = static_cast<double>(row.in_selection)
                   >= (1.0 - rho) * static_cast<double>(row.in_grid) - 1e-12;
        res.pass = res.pass && row.pass;
        res.windows.push_back(row);
    }
    return res;
}

SolidificationResult solidification_probe(Environment const& env, CoarseGrid const& grid,
                                          std::vector<std::size_t> const& selection,
                                          SetMask const& probe, SetMask const& W,
                                          SolverOptions opts)
{
    SolidificationResult res;
    res.escape = Field(env.host(), FieldTag::generic, 0.0);
    res.cap_probe = capacity(env, probe, W, opts);
    if (selection.empty())
    {
        for (std::size_t idx : probe.indices())
            res.escape.values[idx] = 1.0;
        res.sup_escape = probe.empty() ? 0.0 : 1.0;
        return res;
    }
    SetMask const S = grid.union_of_boxes(selection);
    if (!S.subset_of(W))
        throw CoarseError("solidification_probe: S must lie inside the killing box");
    Field const h = harmonic_potential(env, S, W, opts);
    for (std::size_t idx : probe.indices())
    {
        double const e = S.contains(idx) ? 0.0 : 1.0 - h.values[idx];
        res.escape.values[idx] = e;
        res.sup_escape = std::max(res.sup_escape, e);
    }
    res.cap_S = equilibrium_measure_from(env, S, W, h).total;
    res.ratio = res.cap_probe > 0.0 ? res.cap_S / res.cap_probe : 0.0;
    return res;
}

}  // namespace hwgff
