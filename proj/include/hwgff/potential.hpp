// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hwgff/environment.hpp"
#include "hwgff/lattice.hpp"

namespace hwgff {

class SolverError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class PotentialError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
enum class FieldTag
{
    gff_sample,
    harmonic_potential,
    conditioned_mean,
    local_field,
    harmonic_average,
    generic
};

std::string to_string(FieldTag tag);

/// Real value per vertex of a reference box.
struct Field
{
    LatticeBox box;
    std::vector<double> values;
    FieldTag tag = FieldTag::generic;

    Field() = default;
    explicit Field(LatticeBox b, FieldTag t = FieldTag::generic, double fill = 0.0)
        : box(std::move(b)), values(box.volume(), fill), tag(t)
    {
    }

    double operator[](std::size_t idx) const { return values[idx]; }
    double& operator[](std::size_t idx) { return values[idx]; }
    double at(Coord const& x) const { return values[box.index(x)]; }
    std::size_t size() const { return values.size(); }
};

/// Nonnegative weights on the vertices of a mask. `weights` is aligned with
/// the mask's reference box and vanishes off the support.
struct VertexMeasure
{
    SetMask support;
    std::vector<double> weights;
    double total = 0.0;

    double operator[](std::size_t idx) const { return weights[idx]; }
    /// Recompute `total` from the weights.
    void refresh_total();
};

//---------------------------------------------------------------------------//
/*!
 * Precision matrix of the zero-boundary field on U:
 * Q_xx = mu_x (all 2d neighbours), Q_xy = -omega_xy for y in U.
 *
 * U is numbered by its active list (host index order). Copies share the
 * assembled data.
 */
class PrecisionOperator
{
  public:
    PrecisionOperator() = default;

    static PrecisionOperator assemble(Environment const& env, SetMask const& U);

    Environment const& env() const { return d_->env; }
    SetMask const& mask() const { return d_->mask; }
    LatticeBox const& box() const { return d_->env.host(); }
    std::size_t size() const { return d_->active.size(); }
    std::vector<std::size_t> const& active() const { return d_->active; }
    /// Local index of a host vertex, or -1 if it is not in U.
    std::int64_t local(std::size_t host_idx) const { return d_->local[host_idx]; }
    double diag(std::size_t k) const { return d_->mu[k]; }
    int degree() const { return 2 * d_->env.dim(); }
    /// Neighbour j of active vertex k (host index) and its edge weight.
    std::size_t neighbor_host(std::size_t k, int j) const { return d_->nbr_host[k * degree() + j]; }
    std::int64_t neighbor_local(std::size_t k, int j) const
    {
        return d_->nbr_local[k * degree() + j];
    }
    double neighbor_weight(std::size_t k, int j) const { return d_->nbr_w[k * degree() + j]; }

    /// y = Q x on local vectors.
    void apply(std::span<double const> x, std::span<double> y) const;
    /// b_x = sum over neighbours y outside U of omega_xy * values[y]
    /// (host-aligned input).
    std::vector<double> boundary_load(std::span<double const> host_values) const;

    std::vector<double> to_local(std::span<double const> host_values) const;
    /// Host-aligned field equal to `local` on U and `outside` elsewhere.
    Field to_field(std::span<double const> local, FieldTag tag = FieldTag::generic) const;

    Eigen::SparseMatrix<double> sparse() const;
    Eigen::MatrixXd dense() const;

  private:
    struct Data
    {
        Environment env;
        SetMask mask;
        std::vector<std::size_t> active;
        std::vector<std::int64_t> local;
        std::vector<double> mu;
        std::vector<std::size_t> nbr_host;
        std::vector<std::int64_t> nbr_local;
        std::vector<double> nbr_w;
    };
    std::shared_ptr<Data const> d_;
};

//---------------------------------------------------------------------------//
struct SolverOptions
{
    enum class Kind
    {
        automatic,  // dense below the threshold, CG above
        cg,
        dense,
        sparse_cholesky
    };
    Kind kind = Kind::automatic;
    double rel_tol = 1e-10;
    std::size_t max_iter = 0;  // 0: 50 * sqrt(n)
    std::size_t dense_threshold = 1000;
};

/// Reusable SPD solver bound to one precision operator. Factorizations are
/// built once at construction; `solve` is const and thread-safe.
class SpdSolver
{
  public:
    explicit SpdSolver(PrecisionOperator op, SolverOptions opts = {});

    PrecisionOperator const& op() const { return op_; }
    SolverOptions::Kind kind() const { return kind_; }
    std::vector<double> solve(std::span<double const> rhs) const;

  private:
    std::vector<double> solve_cg(std::span<double const> rhs) const;

    PrecisionOperator op_;
    SolverOptions opts_;
    SolverOptions::Kind kind_;
    std::shared_ptr<Eigen::LLT<Eigen::MatrixXd> const> dense_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> const> sparse_;
};

//---------------------------------------------------------------------------//
// Operations
//---------------------------------------------------------------------------//
/// (L f)(x) = (1/mu_x) sum_y omega_xy (f(y) - f(x)) on U, zero elsewhere.
/// `f` must be aligned with the host; NaN entries count as missing.
Field apply_generator(PrecisionOperator const& op, Field const& f);

/// E(f, g) = 1/2 sum_x sum_{y~x} omega_xy (f(y)-f(x)) (g(y)-g(x)), with both
/// fields extended by zero off the host.
double dirichlet_form(Environment const& env, Field const& f, Field const& g);

/// x -> g_U(x, y); zero off U.
Field killed_green_column(PrecisionOperator const& op, std::size_t y, SolverOptions opts = {});
Field killed_green_column(SpdSolver const& solver, std::size_t y);

/// P_x[H_A < T_V]: 1 on A, 0 off V, harmonic on V \ A.
Field harmonic_potential(Environment const& env, SetMask const& A, SetMask const& V,
                         SolverOptions opts = {});

/// e_{A,V} = (Q_V h_{A,V}) restricted to A.
VertexMeasure equilibrium_measure(Environment const& env, SetMask const& A, SetMask const& V,
                                  SolverOptions opts = {});
/// Same from a precomputed potential.
VertexMeasure equilibrium_measure_from(Environment const& env, SetMask const& A,
                                       SetMask const& V, Field const& h);

double capacity(Environment const& env, SetMask const& A, SetMask const& V,
                SolverOptions opts = {});

/// eta(y) = P_x[X_{T_B} = y] for B the l-infinity ball B(x, r).
VertexMeasure exit_distribution(Environment const& env, Coord const& x, int r,
                                SolverOptions opts = {});

struct TruncatedGreen
{
    std::vector<int> radii;      // radii actually solved
    std::vector<double> values;  // g_{B(x,R)}(x, y)
    std::vector<double> bounds;  // c2 * dist(x, boundary)^{2-d}
    double value = 0.0;
    double bound = 0.0;
    double c2 = 0.0;
    bool heuristic_constant = true;
};

/// Heuristic constant in the decay bound g(x, y) <= c2 |x - y|^{2-d}.
double green_decay_constant(int d, double lambda, double kappa = 2.0);

/// g_{B(x,R)}(x, y) along a ladder of radii; radii whose ball plus one layer
/// leaves the host are skipped. Throws if `target_bound` cannot be met.
TruncatedGreen truncated_full_green(Environment const& env, Coord const& x, Coord const& y,
                                    std::vector<int> radii,
                                    std::optional<double> target_bound = std::nullopt,
                                    SolverOptions opts = {});

//---------------------------------------------------------------------------//
// Export
//---------------------------------------------------------------------------//
void write_field_csv(std::ostream& os, Field const& f);
void write_measure_csv(std::ostream& os, VertexMeasure const& m);
void write_field_binary(std::ostream& os, Field const& f, std::uint64_t record = 0);
Field read_field_binary(std::istream& is, std::uint64_t* record = nullptr);

}  // namespace hwgff
