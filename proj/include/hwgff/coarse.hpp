// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwgff/gff.hpp"
#include "hwgff/potential.hpp"

namespace hwgff {

class CoarseError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// L(N) = ceil(N^{2/d} / (log N)^{1/(2d)}).
int coarse_scale(int N, int d);

//---------------------------------------------------------------------------//
/*!
 * Grid C_N = (4KL)Z^d intersected with V_N, with boxes
 * B_z = z + [-L, L)^d inside U_z = z + [-KL, KL)^d.
 */
struct CoarseGrid
{
    int N = 0;
    int K = 0;
    int L = 0;
    LatticeBox host;
    std::vector<Coord> points;  // C_N in host index order
    std::vector<LatticeBox> B;
    std::vector<LatticeBox> U;

    std::size_t size() const { return points.size(); }
    int spacing() const { return 4 * K * L; }
    SetMask box_mask(std::size_t i) const { return SetMask::from_box(host, B[i]); }
    SetMask local_mask(std::size_t i) const { return SetMask::from_box(host, U[i]); }
    /// Union of B_z over the selected grid points.
    SetMask union_of_boxes(std::vector<std::size_t> const& selection) const;
    std::vector<std::size_t> all() const;
};

CoarseGrid build_grid(SetMask const& VN, int N, int K, std::optional<int> override_L = std::nullopt);

//---------------------------------------------------------------------------//
/// nu(z) = e_S(B_z) / Cap(S) for S the union of the selected boxes, killed
/// outside V. The measure lives on the grid points (host-aligned).
VertexMeasure nu_coefficients(Environment const& env, CoarseGrid const& grid,
                              std::vector<std::size_t> const& selection, SetMask const& V,
                              SolverOptions opts = {});

/// Selector: position k holds f(z_k) for the k-th selected grid point.
using Selector = std::vector<Coord>;

/*!
 * Cached harmonic averages xi^{z} = harmonic extension into U_z of the field
 * outside U_z, and local fields psi^{z}, for a fixed grid selection.
 */
class CoarseFunctionals
{
  public:
    CoarseFunctionals(Environment const& env, CoarseGrid const& grid,
                      std::vector<std::size_t> selection, std::vector<double> nu,
                      SolverOptions opts = {});

    std::size_t size() const { return selection_.size(); }
    std::vector<std::size_t> const& selection() const { return selection_; }
    std::vector<double> const& nu() const { return nu_; }
    CoarseGrid const& grid() const { return *grid_; }

    /// Load a host-aligned field; computes xi and psi on every selected B_z.
    void load(Field const& phi);
    /// xi^{z_k} on B_{z_k} (box index order).
    std::vector<double> const& xi(std::size_t k) const { return xi_[k]; }
    std::vector<double> const& psi(std::size_t k) const { return psi_[k]; }
    /// Values of the loaded field on B_{z_k}.
    std::vector<double> const& phi(std::size_t k) const { return phi_[k]; }

    /// Z_f for a selector.
    double z_f(Selector const& f) const;
    /// b Z_f - beta <phi, eta>.
    double z_f_beta_b(Selector const& f, double beta, double b, VertexMeasure const& eta) const;
    /// sup over selectors, computed as sum_z nu(z) max_{B_z} xi^z.
    double z_sup() const;
    /// sup over selectors by explicit enumeration (small instances only).
    double z_sup_enumerated(std::size_t max_selectors = 1u << 20) const;

  private:
    Environment env_;
    std::shared_ptr<CoarseGrid const> grid_;
    std::vector<std::size_t> selection_;
    std::vector<double> nu_;
    std::vector<std::shared_ptr<HarmonicExtender const>> ext_;
    std::vector<std::vector<std::size_t>> box_index_;  // host indices of B_z
    std::vector<std::vector<double>> xi_, psi_, phi_;
    Field loaded_;
};

/// Every vertex of B_z as a selector entry ordering (for enumeration tests).
std::vector<Coord> box_points(LatticeBox const& b);

//---------------------------------------------------------------------------//
struct Classification
{
    std::vector<std::uint8_t> good;  // per selected box
    double level = 0.0;              // sqrt(a log N)
    std::size_t n_good = 0;
};

/// z is good when min_{B_z} psi^z <= -sqrt(a log N).
Classification classify_boxes(CoarseFunctionals const& cf, double a, int N);

/// a_delta = 4 delta g_hat.
double good_level(double delta, double g_hat);

struct WindowRow
{
    Coord center;
    std::size_t in_grid = 0;
    std::size_t in_selection = 0;
    bool pass = true;
};

struct CoveringResult
{
    bool pass = true;
    int L_hat = 0;
    std::vector<WindowRow> windows;
};

/// Default window half-width N / (log N)^{1/(4d)} rounded to a positive
/// multiple of 4KL.
int default_window(CoarseGrid const& grid);

/// Windows F = x + [-L_hat, L_hat]^d for x in `centers` with coordinates in
/// L_hat Z^d; pass iff |F cap S| >= (1 - rho)|F cap C_N| for every window.
CoveringResult covering_check(CoarseGrid const& grid, std::vector<std::uint8_t> const& in_selection,
                              double rho, int L_hat, SetMask const& centers);

struct SolidificationResult
{
    Field escape;                  // 1 - h_{S,W} on the probe set, 0 elsewhere
    double sup_escape = 0.0;
    double cap_S = 0.0;
    double cap_probe = 0.0;
    double ratio = 0.0;            // Cap_W(S) / Cap_W(probe)
};

/// Escape probabilities P_z[T_W < H_S] on `probe` and the capacity ratio.
SolidificationResult solidification_probe(Environment const& env, CoarseGrid const& grid,
                                          std::vector<std::size_t> const& selection,
                                          SetMask const& probe, SetMask const& W,
                                          SolverOptions opts = {});

}  // namespace hwgff
