// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "hwgff/potential.hpp"
#include "hwgff/rng.hpp"
#include "hwgff/stats.hpp"

namespace hwgff {

class FactorizationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Nested-dissection order of the active vertices of an operator
/// (coordinate bisection, separators last). Entry k is the local index
/// placed at position k.
std::vector<std::size_t> nested_dissection_order(PrecisionOperator const& op);

//---------------------------------------------------------------------------//
/*!
 * Exact sampler of the zero-boundary field on U.
 *
 * The permuted precision matrix P Q P^T = L L^T is factored once; a sample is
 * P^T L^{-T} z with z i.i.d. standard normal. The factor is shared between
 * copies; each copy owns its RNG stream.
 */
class GffSampler
{
  public:
    GffSampler(Environment const& env, SetMask const& U, std::uint64_t seed);
    GffSampler(PrecisionOperator op, std::uint64_t seed);

    /// Same factor, different stream.
    GffSampler with_seed(std::uint64_t seed) const;

    PrecisionOperator const& op() const { return factor_->op; }
    std::size_t size() const { return factor_->op.size(); }

    /// Sample on U in local numbering.
    void sample_local(std::span<double> out);
    std::vector<double> sample_local();
    /// Host-aligned sample, zero off U.
    Field sample();

    /// ||L L^T - P Q P^T||_F / ||Q||_F.
    double factor_residual() const;

    Philox4x32& rng() { return rng_; }

  private:
    struct Factor
    {
        PrecisionOperator op;
        std::vector<std::size_t> order;
        Eigen::SparseMatrix<double> permuted;
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                             Eigen::NaturalOrdering<int>>
            llt;
    };
    std::shared_ptr<Factor> factor_;
    Philox4x32 rng_;
    Eigen::VectorXd z_;
};

//---------------------------------------------------------------------------//
/// Cached Dirichlet solver: harmonic extension of outside values into U.
class HarmonicExtender
{
  public:
    HarmonicExtender(Environment const& env, SetMask const& U, SolverOptions opts = {});

    PrecisionOperator const& op() const { return solver_.op(); }
    /// Field equal to phi off U and harmonic in U with phi's outside values.
    Field extend(Field const& phi) const;
    /// Harmonic extension evaluated only at the local U-vertices.
    std::vector<double> extend_local(std::span<double const> host_values) const;

  private:
    SpdSolver solver_;
};

struct Decomposition
{
    Field xi;   // harmonic average
    Field psi;  // local field
    SetMask U;
};

/// phi = xi + psi with xi the harmonic extension of phi restricted to U^c.
Decomposition markov_decompose(Environment const& env, Field const& phi, SetMask const& U,
                               SolverOptions opts = {});
Decomposition markov_decompose(HarmonicExtender const& ext, Field const& phi);

/// Monte Carlo estimate of E[max_{x in D} phi_x] from exact samples.
Estimate expected_max_estimate(GffSampler& sampler, SetMask const& D, std::size_t n_samples);
Estimate expected_max_estimate(Environment const& env, SetMask const& U, SetMask const& D,
                               std::size_t n_samples, std::uint64_t seed);

/// Binary sample record (field + replica index).
void write_sample_record(std::ostream& os, Field const& f, std::uint64_t replica);

}  // namespace hwgff
