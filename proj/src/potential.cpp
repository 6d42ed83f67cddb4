// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace hwgff {

namespace {

constexpr char kFieldMagic[8] = {'H', 'W', 'G', 'F', 'F', 'L', 'D', '1'};

void require_host_mask(Environment const& env, SetMask const& m, char const* what)
{
    if (!(m.box() == env.host()))
        throw PotentialError(std::string(what) + ": mask must be defined on the environment host");
}

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
        throw PotentialError("read_field_binary: truncated stream");
    return v;
}

double dot(std::span<double const> a, std::span<double const> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

}  // namespace

std::string to_string(FieldTag tag)
{
    switch (tag)
    {
        case FieldTag::gff_sample: return "gff-sample";
        case FieldTag::harmonic_potential: return "harmonic-potential";
        case FieldTag::conditioned_mean: return "conditioned-mean";
        case FieldTag::local_field: return "local-field";
        case FieldTag::harmonic_average: return "harmonic-average";
        case FieldTag::generic: return "generic";
    }
    return "generic";
}

void VertexMeasure::refresh_total()
{
    total = 0.0;
    for (double w : weights)
        total += w;
}

//---------------------------------------------------------------------------//
PrecisionOperator PrecisionOperator::assemble(Environment const& env, SetMask const& U)
{
    require_host_mask(env, U, "assemble");
    if (U.empty())
        throw PotentialError("assemble: U is empty");
    if (U.touches_box_faces())
        throw PotentialError("assemble: U touches the host boundary");

    auto d = std::make_shared<Data>();
    d->env = env;
    d->mask = U;
    d->active = U.indices();
    LatticeBox const& host = env.host();
    d->local.assign(host.volume(), -1);
    for (std::size_t k = 0; k < d->active.size(); ++k)
        d->local[d->active[k]] = static_cast<std::int64_t>(k);

    int const deg = 2 * env.dim();
    std::size_t const n = d->active.size();
    d->mu.resize(n);
    d->nbr_host.resize(n * deg);
    d->nbr_local.resize(n * deg);
    d->nbr_w.resize(n * deg);
    for (std::size_t k = 0; k < n; ++k)
    {
        std::size_t const idx = d->active[k];
        double mu = 0.0;
        for (int a = 0; a < env.dim(); ++a)
        {
            for (int s = 0; s < 2; ++s)
            {
                int const j = 2 * a + s;
                auto const nb = host.neighbor(idx, a, s == 0 ? -1 : 1);
                double const w = s == 0 ? env.down(idx, a) : env.up(idx, a);
                mu += w;
                d->nbr_host[k * deg + j] = static_cast<std::size_t>(nb);
                d->nbr_local[k * deg + j] = d->local[static_cast<std::size_t>(nb)];
                d->nbr_w[k * deg + j] = w;
            }
        }
        d->mu[k] = mu;
    }
    PrecisionOperator op;
    op.d_ = std::move(d);
    return op;
}

void PrecisionOperator::apply(std::span<double const> x, std::span<double> y) const
{
    int const deg = degree();
    std::size_t const n = size();
    auto const* nl = d_->nbr_local.data();
    auto const* nw = d_->nbr_w.data();
    for (std::size_t k = 0; k < n; ++k)
    {
        double s = d_->mu[k] * x[k];
        for (int j = 0; j < deg; ++j)
        {
            auto const l = nl[k * deg + j];
            if (l >= 0)
                s -= nw[k * deg + j] * x[static_cast<std::size_t>(l)];
        }
        y[k] = s;
    }
}

std::vector<double> PrecisionOperator::boundary_load(std::span<double const> host_values) const
{
    int const deg = degree();
    std::vector<double> b(size(), 0.0);
    for (std::size_t k = 0; k < size(); ++k)
    {
        double s = 0.0;
        for (int j = 0; j < deg; ++j)
        {
            if (d_->nbr_local[k * deg + j] < 0)
                s += d_->nbr_w[k * deg + j] * host_values[d_->nbr_host[k * deg + j]];
        }
        b[k] = s;
    }
    return b;
}

std::vector<double> PrecisionOperator::to_local(std::span<double const> host_values) const
{
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k)
        out[k] = host_values[d_->active[k]];
    return out;
}

Field PrecisionOperator::to_field(std::span<double const> local, FieldTag tag) const
{
    Field f(box(), tag, 0.0);
    for (std::size_t k = 0; k < size(); ++k)
        f.values[d_->active[k]] = local[k];
    return f;
}

Eigen::SparseMatrix<double> PrecisionOperator::sparse() const
{
    int const deg = degree();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size() * (deg + 1));
    for (std::size_t k = 0; k < size(); ++k)
    {
        auto const row = static_cast<int>(k);
        trip.emplace_back(row, row, d_->mu[k]);
        for (int j = 0; j < deg; ++j)
        {
            auto const l = d_->nbr_local[k * deg + j];
            if (l >= 0)
                trip.emplace_back(row, static_cast<int>(l), -d_->nbr_w[k * deg + j]);
        }
    }
    auto const n = static_cast<Eigen::Index>(size());
    Eigen::SparseMatrix<double> q(n, n);
    q.setFromTriplets(trip.begin(), trip.end());
    return q;
}

Eigen::MatrixXd PrecisionOperator::dense() const
{
    return Eigen::MatrixXd(sparse());
}

//---------------------------------------------------------------------------//
SpdSolver::SpdSolver(PrecisionOperator op, SolverOptions opts)
    : op_(std::move(op)), opts_(opts), kind_(opts.kind)
{
    if (kind_ == SolverOptions::Kind::automatic)
    {
        kind_ = op_.size() <= opts_.dense_threshold ? SolverOptions::Kind::dense
                                                    : SolverOptions::Kind::cg;
    }
    if (kind_ == SolverOptions::Kind::dense)
    {
        auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(op_.dense());
        if (llt->info() != Eigen::Success)
            throw SolverError("dense Cholesky failed: precision matrix not positive definite");
        dense_ = std::move(llt);
    }
    else if (kind_ == SolverOptions::Kind::sparse_cholesky)
    {
        auto ldlt = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        ldlt->compute(op_.sparse());
        if (ldlt->info() != Eigen::Success)
            throw SolverError("sparse Cholesky failed: precision matrix not positive definite");
        sparse_ = std::move(ldlt);
    }
}

std::vector<double> SpdSolver::solve(std::span<double const> rhs) const
{
    if (rhs.size() != op_.size())
        throw SolverError("SpdSolver::solve: right-hand side has wrong length");
    switch (kind_)
    {
        case SolverOptions::Kind::dense: {
            Eigen::Map<Eigen::VectorXd const> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
            Eigen::VectorXd x = dense_->solve(b);
            return {x.data(), x.data() + x.size()};
        }
        case SolverOptions::Kind::sparse_cholesky: {
            Eigen::Map<Eigen::VectorXd const> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
            Eigen::VectorXd x = sparse_->solve(b);
            return {x.data(), x.data() + x.size()};
        }
        default:
            return solve_cg(rhs);
    }
}

std::vector<double> SpdSolver::solve_cg(std::span<double const> rhs) const
{
    std::size_t const n = op_.size();
    std::vector<double> x(n, 0.0);
    double const bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0)
        return x;
    std::size_t const max_iter
        = opts_.max_iter > 0
              ? opts_.max_iter
              : std::max<std::size_t>(
                  50, static_cast<std::size_t>(std::ceil(50.0 * std::sqrt(static_cast<double>(n)))));

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = r[i] / op_.diag(i);
    p = z;
    double rz = dot(r, z);
    double const target = opts_.rel_tol * bnorm;
    for (std::size_t it = 0; it < max_iter; ++it)
    {
        op_.apply(p, q);
        double const alpha = rz / dot(p, q);
        for (std::size_t i = 0; i < n; ++i)
        {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if (std::sqrt(dot(r, r)) <= target)
            return x;
        for (std::size_t i = 0; i < n; ++i)
            z[i] = r[i] / op_.diag(i);
        double const rz_new = dot(r, z);
        double const beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    // Recompute the true residual before giving up.
    op_.apply(x, q);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res += (rhs[i] - q[i]) * (rhs[i] - q[i]);
    if (std::sqrt(res) <= target)
        return x;
    throw SolverError("conjugate gradient did not reach relative residual "
                      + std::to_string(opts_.rel_tol) + " in " + std::to_string(max_iter)
                      + " iterations (n = " + std::to_string(n) + ")");
}

//---------------------------------------------------------------------------//
Field apply_generator(PrecisionOperator const& op, Field const& f)
{
    if (!(f.box == op.box()))
        throw PotentialError("apply_generator: field must be aligned with the host");
    Field out(op.box(), FieldTag::generic, 0.0);
    int const deg = op.degree();
    for (std::size_t k = 0; k < op.size(); ++k)
    {
        std::size_t const idx = op.active()[k];
        double const fx = f.values[idx];
        double s = 0.0;
        for (int j = 0; j < deg; ++j)
        {
            double const fy = f.values[op.neighbor_host(k, j)];
            if (std::isnan(fy) || std::isnan(fx))
                throw PotentialError("apply_generator: missing boundary value");
            s += op.neighbor_weight(k, j) * (fy - fx);
        }
        out.values[idx] = s / op.diag(k);
    }
    return out;
}

double dirichlet_form(Environment const& env, Field const& f, Field const& g)
{
    LatticeBox const& host = env.host();
    if (!(f.box == host) || !(g.box == host))
        throw PotentialError("dirichlet_form: fields must be aligned with the host");
    double sum = 0.0;
    for (std::size_t i = 0; i < host.volume(); ++i)
    {
        for (int a = 0; a < host.dim(); ++a)
        {
            auto const up = host.neighbor(i, a, 1);
            double const fu = up >= 0 ? f.values[static_cast<std::size_t>(up)] : 0.0;
            double const gu = up >= 0 ? g.values[static_cast<std::size_t>(up)] : 0.0;
            sum += env.up(i, a) * (fu - f.values[i]) * (gu - g.values[i]);
            if (host.coord(i, a) == host.corner()[a])
                sum += env.down(i, a) * f.values[i] * g.values[i];
        }
    }
    return sum;
}

Field killed_green_column(SpdSolver const& solver, std::size_t y)
{
    auto const& op = solver.op();
    auto const ky = op.local(y);
    if (ky < 0)
        return Field(op.box(), FieldTag::generic, 0.0);
    std::vector<double> e(op.size(), 0.0);
    e[static_cast<std::size_t>(ky)] = 1.0;
    return op.to_field(solver.solve(e));
}

Field killed_green_column(PrecisionOperator const& op, std::size_t y, SolverOptions opts)
{
    if (op.local(y) < 0)
        return Field(op.box(), FieldTag::generic, 0.0);
    return killed_green_column(SpdSolver(op, opts), y);
}

Field harmonic_potential(Environment const& env, SetMask const& A, SetMask const& V,
                         SolverOptions opts)
{
    require_host_mask(env, A, "harmonic_potential");
    require_host_mask(env, V, "harmonic_potential");
    if (!A.subset_of(V))
        throw PotentialError("harmonic_potential: A is not contained in V");
    if (V.touches_box_faces())
        throw PotentialError("harmonic_potential: V touches the host boundary");

    Field h(env.host(), FieldTag::harmonic_potential, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        h.values[i] = A.contains(i) ? 1.0 : 0.0;
    SetMask const W = V.minus(A);
    if (W.empty() || A.empty())
        return h;
    auto const op = PrecisionOperator::assemble(env, W);
    auto const b = op.boundary_load(h.values);
    auto const x = SpdSolver(op, opts).solve(b);
    for (std::size_t k = 0; k < op.size(); ++k)
        h.values[op.active()[k]] = std::clamp(x[k], 0.0, 1.0);
    return h;
}

VertexMeasure equilibrium_measure_from(Environment const& env, SetMask const& A,
                                       SetMask const& V, Field const& h)
{
    require_host_mask(env, A, "equilibrium_measure");
    if (!A.subset_of(V))
        throw PotentialError("equilibrium_measure: A is not contained in V");
    LatticeBox const& host = env.host();
    VertexMeasure m;
    m.support = A;
    m.weights.assign(host.volume(), 0.0);
    for (std::size_t idx : A.indices())
    {
        double e = 0.0;
        for (int a = 0; a < host.dim(); ++a)
        {
            auto const lo = host.neighbor(idx, a, -1);
            auto const hi = host.neighbor(idx, a, 1);
            e += env.down(idx, a) * (1.0 - (lo >= 0 ? h.values[static_cast<std::size_t>(lo)] : 0.0));
            e += env.up(idx, a) * (1.0 - (hi >= 0 ? h.values[static_cast<std::size_t>(hi)] : 0.0));
        }
        if (e < -1e-10)
            throw PotentialError("equilibrium_measure: negative entry " + std::to_string(e)
                                 + " signals a solver failure");
        m.weights[idx] = e < 0.0 ? 0.0 : e;
    }
    m.refresh_total();
    return m;
}

VertexMeasure equilibrium_measure(Environment const& env, SetMask const& A, SetMask const& V,
                                  SolverOptions opts)
{
    return equilibrium_measure_from(env, A, V, harmonic_potential(env, A, V, opts));
}

double capacity(Environment const& env, SetMask const& A, SetMask const& V, SolverOptions opts)
{
    return equilibrium_measure(env, A, V, opts).total;
}

VertexMeasure exit_distribution(Environment const& env, Coord const& x, int r, SolverOptions opts)
{
    if (r < 0)
        throw PotentialError("exit_distribution: radius must be nonnegative");
    LatticeBox const& host = env.host();
    if (!host.contains(LatticeBox::ball(x, r + 1)))
        throw PotentialError("exit_distribution: B(x, r + 1) is not inside the host");
    SetMask const B = SetMask::from_box(host, LatticeBox::ball(x, r));
    if (B.touches_box_faces())
        throw PotentialError("exit_distribution: ball touches the host boundary");
    opts.rel_tol = std::min(opts.rel_tol, 1e-13);
    auto const op = PrecisionOperator::assemble(env, B);
    Field const g = killed_green_column(SpdSolver(op, opts), host.index(x));

    VertexMeasure m;
    m.support = B.external_boundary();
    m.weights.assign(host.volume(), 0.0);
    for (std::size_t k = 0; k < op.size(); ++k)
    {
        for (int j = 0; j < op.degree(); ++j)
        {
            if (op.neighbor_local(k, j) < 0)
                m.weights[op.neighbor_host(k, j)]
                    += g.values[op.active()[k]] * op.neighbor_weight(k, j);
        }
    }
    m.refresh_total();
    if (std::abs(m.total - 1.0) > 1e-9)
        throw PotentialError("exit_distribution: total mass " + std::to_string(m.total)
                             + " deviates from 1");
    return m;
}

double green_decay_constant(int d, double lambda, double kappa)
{
    if (d < 3)
        throw PotentialError("green_decay_constant: transient decay needs d >= 3");
    double const base = std::tgamma(0.5 * d - 1.0) / (4.0 * std::pow(std::numbers::pi, 0.5 * d));
    return kappa * base / lambda;
}

TruncatedGreen truncated_full_green(Environment const& env, Coord const& x, Coord const& y,
                                    std::vector<int> radii, std::optional<double> target_bound,
                                    SolverOptions opts)
{
    int const d = env.dim();
    TruncatedGreen out;
    out.c2 = green_decay_constant(d, env.lambda());
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    LatticeBox const& host = env.host();
    int sep = 0;
    for (int i = 0; i < d; ++i)
        sep = std::max(sep, std::abs(x[i] - y[i]));
    for (int R : radii)
    {
        if (R < sep || !host.contains(LatticeBox::ball(x, R + 1)))
            continue;
        SetMask const B = SetMask::from_box(host, LatticeBox::ball(x, R));
        if (B.touches_box_faces())
            continue;
        auto const op = PrecisionOperator::assemble(env, B);
        Field const g = killed_green_column(op, host.index(y), opts);
        out.radii.push_back(R);
        out.values.push_back(g.at(x));
        out.bounds.push_back(out.c2 * std::pow(static_cast<double>(R + 1 - sep), 2.0 - d));
    }
    if (out.radii.empty())
        throw PotentialError("truncated_full_green: no radius fits inside the host");
    out.value = out.values.back();
    out.bound = out.bounds.back();
    if (target_bound && out.bound > *target_bound)
        throw PotentialError("truncated_full_green: requested error bound unachievable within host");
    return out;
}

//---------------------------------------------------------------------------//
void write_field_csv(std::ostream& os, Field const& f)
{
    int const d = f.box.dim();
    for (int i = 0; i < d; ++i)
        os << 'x' << i << ',';
    os << "value\n";
    os.precision(17);
    for (std::size_t idx = 0; idx < f.size(); ++idx)
    {
        for (int i = 0; i < d; ++i)
            os << f.box.coord(idx, i) << ',';
        os << f.values[idx] << '\n';
    }
}

void write_measure_csv(std::ostream& os, VertexMeasure const& m)
{
    LatticeBox const& box = m.support.box();
    int const d = box.dim();
    for (int i = 0; i < d; ++i)
        os << 'x' << i << ',';
    os << "weight\n";
    os.precision(17);
    for (std::size_t idx : m.support.indices())
    {
        for (int i = 0; i < d; ++i)
            os << box.coord(idx, i) << ',';
        os << m.weights[idx] << '\n';
    }
}

void write_field_binary(std::ostream& os, Field const& f, std::uint64_t record)
{
    os.write(kFieldMagic, sizeof(kFieldMagic));
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.box.dim()));
    for (int c : f.box.corner())
        put<std::int32_t>(os, c);
    for (int s : f.box.sides())
        put<std::int32_t>(os, s);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.tag));
    put<std::uint64_t>(os, record);
    put<std::uint64_t>(os, f.values.size());
    os.write(reinterpret_cast<char const*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

Field read_field_binary(std::istream& is, std::uint64_t* record)
{
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
        throw PotentialError("read_field_binary: bad magic");
    if (get<std::uint32_t>(is) != 1)
        throw PotentialError("read_field_binary: unsupported version");
    auto const d = static_cast<int>(get<std::uint32_t>(is));
    Coord corner(d), sides(d);
    for (int& c : corner)
        c = get<std::int32_t>(is);
    for (int& s : sides)
        s = get<std::int32_t>(is);
    auto const tag = static_cast<FieldTag>(get<std::uint32_t>(is));
    auto const rec = get<std::uint64_t>(is);
    if (record)
        *record = rec;
    Field f(LatticeBox(corner, sides), tag);
    auto const n = get<std::uint64_t>(is);
    if (n != f.values.size())
        throw PotentialError("read_field_binary: value count mismatch");
    is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is)
        throw PotentialError("read_field_binary: truncated value array");
    return f;
}

}  // namespace hwgff
