// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/gff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace hwgff {

namespace {

void dissect(PrecisionOperator const& op, std::vector<std::size_t> ids,
             std::vector<std::size_t>& out)
{
    if (ids.size() <= 16)
    {
        std::sort(ids.begin(), ids.end());
        out.insert(out.end(), ids.begin(), ids.end());
        return;
    }
    LatticeBox const& box = op.box();
    int const d = box.dim();
    int best_axis = 0;
    int best_lo = 0;
    int best_extent = -1;
    for (int a = 0; a < d; ++a)
    {
        int lo = std::numeric_limits<int>::max();
        int hi = std::numeric_limits<int>::min();
        for (std::size_t k : ids)
        {
            int const c = box.coord(op.active()[k], a);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        if (hi - lo > best_extent)
        {
            best_extent = hi - lo;
            best_axis = a;
            best_lo = lo;
        }
    }
    int const mid = best_lo + best_extent / 2;
    std::vector<std::size_t> left, right, sep;
    for (std::size_t k : ids)
    {
        int const c = box.coord(op.active()[k], best_axis);
        if (c < mid)
            left.push_back(k);
        else if (c > mid)
            right.push_back(k);
        else
            sep.push_back(k);
    }
    if (!left.empty())
        dissect(op, std::move(left), out);
    if (!right.empty())
        dissect(op, std::move(right), out);
    if (!sep.empty())
        dissect(op, std::move(sep), out);
}

}  // namespace

std::vector<std::size_t> nested_dissection_order(PrecisionOperator const& op)
{
    std::vector<std::size_t> ids(op.size());
    for (std::size_t k = 0; k < ids.size(); ++k)
        ids[k] = k;
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    dissect(op, std::move(ids), out);
    return out;
}

//---------------------------------------------------------------------------//
GffSampler::GffSampler(Environment const& env, SetMask const& U, std::uint64_t seed)
    : GffSampler(PrecisionOperator::assemble(env, U), seed)
{
}

GffSampler::GffSampler(PrecisionOperator op, std::uint64_t seed)
    : factor_(std::make_shared<Factor>()), rng_(seed)
{
    auto& f = *factor_;
    f.op = std::move(op);
    f.order = nested_dissection_order(f.op);
    std::size_t const n = f.op.size();
    std::vector<int> position(n);
    for (std::size_t k = 0; k < n; ++k)
        position[f.order[k]] = static_cast<int>(k);

    Eigen::SparseMatrix<double> const q = f.op.sparse();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(q.nonZeros()));
    for (int col = 0; col < q.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(q, col); it; ++it)
            trip.emplace_back(position[static_cast<std::size_t>(it.row())],
                              position[static_cast<std::size_t>(it.col())], it.value());
    f.permuted.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    f.permuted.setFromTriplets(trip.begin(), trip.end());
    f.llt.compute(f.permuted);
    if (f.llt.info() != Eigen::Success)
        throw FactorizationError("GffSampler: Cholesky factorization failed");
    z_.resize(static_cast<Eigen::Index>(n));
}

GffSampler GffSampler::with_seed(std::uint64_t seed) const
{
    GffSampler s = *this;
    s.rng_ = Philox4x32(seed);
    return s;
}

void GffSampler::sample_local(std::span<double> out)
{
    std::size_t const n = size();
    for (std::size_t k = 0; k < n; ++k)
        z_[static_cast<Eigen::Index>(k)] = standard_normal(rng_);
    factor_->llt.matrixU().solveInPlace(z_);
    for (std::size_t k = 0; k < n; ++k)
        out[factor_->order[k]] = z_[static_cast<Eigen::Index>(k)];
}

std::vector<double> GffSampler::sample_local()
{
    std::vector<double> out(size());
    sample_local(out);
    return out;
}

Field GffSampler::sample()
{
    auto const local = sample_local();
    return op().to_field(local, FieldTag::gff_sample);
}

double GffSampler::factor_residual() const
{
    Eigen::SparseMatrix<double> const l = factor_->llt.matrixL();
    Eigen::SparseMatrix<double> const lt = l.transpose();
    Eigen::SparseMatrix<double> const prod = l * lt;
    Eigen::SparseMatrix<double> const diff = prod - factor_->permuted;
    return diff.norm() / factor_->permuted.norm();
}

//---------------------------------------------------------------------------//
namespace {
SolverOptions extender_options(SolverOptions opts, SetMask const& U)
{
    if (opts.kind == SolverOptions::Kind::automatic && U.count() > opts.dense_threshold)
        opts.kind = SolverOptions::Kind::sparse_cholesky;
    return opts;
}
}  // namespace

HarmonicExtender::HarmonicExtender(Environment const& env, SetMask const& U, SolverOptions opts)
    : solver_(PrecisionOperator::assemble(env, U), extender_options(opts, U))
{
}

std::vector<double> HarmonicExtender::extend_local(std::span<double const> host_values) const
{
    return solver_.solve(solver_.op().boundary_load(host_values));
}

Field HarmonicExtender::extend(Field const& phi) const
{
    auto const& op = solver_.op();
    if (!(phi.box == op.box()))
        throw PotentialError("harmonic extension: field must be aligned with the host");
    for (std::size_t k = 0; k < op.size(); ++k)
        for (int j = 0; j < op.degree(); ++j)
            if (op.neighbor_local(k, j) < 0 && std::isnan(phi.values[op.neighbor_host(k, j)]))
                throw PotentialError("harmonic extension: missing boundary data");
    auto const x = extend_local(phi.values);
    Field xi = phi;
    xi.tag = FieldTag::harmonic_average;
    for (std::size_t k = 0; k < op.size(); ++k)
        xi.values[op.active()[k]] = x[k];
    return xi;
}

Decomposition markov_decompose(HarmonicExtender const& ext, Field const& phi)
{
    Decomposition out;
    out.xi = ext.extend(phi);
    out.psi = Field(phi.box, FieldTag::local_field, 0.0);
    for (std::size_t idx : ext.op().active())
        out.psi.values[idx] = phi.values[idx] - out.xi.values[idx];
    out.U = ext.op().mask();
    return out;
}

Decomposition markov_decompose(Environment const& env, Field const& phi, SetMask const& U,
                               SolverOptions opts)
{
    return markov_decompose(HarmonicExtender(env, U, opts), phi);
}

//---------------------------------------------------------------------------//
Estimate expected_max_estimate(GffSampler& sampler, SetMask const& D, std::size_t n_samples)
{
    if (n_samples < 2)
        throw std::invalid_argument("expected_max_estimate: need at least 2 samples");
    auto const& op = sampler.op();
    if (!(D.box() == op.box()) || !D.subset_of(op.mask()) || D.empty())
        throw PotentialError("expected_max_estimate: D must be a nonempty subset of U");
    std::vector<std::size_t> local;
    for (std::size_t idx : D.indices())
        local.push_back(static_cast<std::size_t>(op.local(idx)));
    std::vector<double> buf(op.size());
    RunningStats rs;
    for (std::size_t s = 0; s < n_samples; ++s)
    {
        sampler.sample_local(buf);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t k : local)
            m = std::max(m, buf[k]);
        rs.add(m);
    }
    return rs.estimate();
}

Estimate expected_max_estimate(Environment const& env, SetMask const& U, SetMask const& D,
                               std::size_t n_samples, std::uint64_t seed)
{
    GffSampler sampler(env, U, seed);
    return expected_max_estimate(sampler, D, n_samples);
}

void write_sample_record(std::ostream& os, Field const& f, std::uint64_t replica)
{
    write_field_binary(os, f, replica);
}

}  // namespace hwgff
