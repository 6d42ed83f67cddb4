// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hwgff {

using Coord = std::vector<int>;

class GeometryError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
/*!
 * Axis-aligned box of lattice points with a row-major (axis 0 slowest)
 * vertex numbering.
 *
 * Every vertex iteration in the library follows this index order.
 */
class LatticeBox
{
  public:
    LatticeBox() = default;
    LatticeBox(Coord corner, Coord sides);

    /// Closed l-infinity ball B(center, r).
    static LatticeBox ball(Coord const& center, int r);

    int dim() const { return static_cast<int>(corner_.size()); }
    Coord const& corner() const { return corner_; }
    Coord const& sides() const { return sides_; }
    Coord upper() const;  // inclusive
    std::size_t volume() const { return volume_; }
    std::ptrdiff_t stride(int axis) const { return strides_[axis]; }

    bool contains(Coord const& x) const;
    bool contains(LatticeBox const& other) const;
    std::size_t index(Coord const& x) const;
    Coord coord(std::size_t idx) const;
    /// Coordinate along one axis without building the full vector.
    int coord(std::size_t idx, int axis) const
    {
        return corner_[axis]
               + static_cast<int>((idx / static_cast<std::size_t>(strides_[axis]))
                                  % static_cast<std::size_t>(sides_[axis]));
    }

    /// Index of the neighbor x + sign * e_axis, or -1 if it leaves the box.
    std::ptrdiff_t neighbor(std::size_t idx, int axis, int sign) const;
    /// True if the vertex has a nearest neighbor outside the box.
    bool on_face(std::size_t idx) const;

    bool operator==(LatticeBox const& other) const
    {
        return corner_ == other.corner_ && sides_ == other.sides_;
    }

  private:
    Coord corner_;
    Coord sides_;
    std::vector<std::ptrdiff_t> strides_;
    std::size_t volume_ = 0;
};

/// Checked constructor mirroring the box parameters explicitly.
LatticeBox build_box(int d, Coord const& corner, Coord const& sides);

//---------------------------------------------------------------------------//
/// Subset of the vertices of a reference box.
class SetMask
{
  public:
    SetMask() = default;
    explicit SetMask(LatticeBox box);

    static SetMask full(LatticeBox const& box);
    /// Vertices of `sub` inside `host`; `sub` must lie inside `host`.
    static SetMask from_box(LatticeBox const& host, LatticeBox const& sub);
    static SetMask from_indices(LatticeBox const& host, std::span<std::size_t const> idx);

    LatticeBox const& box() const { return box_; }
    bool contains(std::size_t idx) const { return bits_[idx] != 0; }
    bool contains(Coord const& x) const;
    void insert(std::size_t idx) { bits_[idx] = 1; }
    void erase(std::size_t idx) { bits_[idx] = 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::size_t> indices() const;
    std::vector<std::uint8_t> const& bits() const { return bits_; }

    bool subset_of(SetMask const& other) const;
    bool disjoint_from(SetMask const& other) const;
    SetMask united(SetMask const& other) const;
    SetMask intersected(SetMask const& other) const;
    SetMask minus(SetMask const& other) const;
    SetMask complement() const;

    /// Vertices of the set with a neighbor outside it (lattice neighbors
    /// outside the reference box count as outside the set).
    SetMask internal_boundary() const;
    /// Vertices outside the set adjacent to it; requires the set not to
    /// touch the faces of its reference box.
    SetMask external_boundary() const;
    bool touches_box_faces() const;

    bool operator==(SetMask const& other) const
    {
        return box_ == other.box_ && bits_ == other.bits_;
    }

  private:
    void check_same_box(SetMask const& other) const;

    LatticeBox box_;
    std::vector<std::uint8_t> bits_;
};

//---------------------------------------------------------------------------//
/*!
 * Closed continuum shape in R^d: an axis box or a Euclidean ball.
 */
struct Shape
{
    enum class Kind
    {
        box,
        ball
    };

    Kind kind = Kind::box;
    std::vector<double> center;
    std::vector<double> half_widths;  // box only
    double radius = 0.0;              // ball only

    static Shape box(std::vector<double> center, std::vector<double> half_widths);
    static Shape cube(int d, double half_width);
    static Shape ball(std::vector<double> center, double radius);
    static Shape unit_ball(int d, double radius = 1.0);

    int dim() const { return static_cast<int>(center.size()); }
    bool contains(std::span<double const> p) const;
    /// Euclidean distance from p to the complement; <= 0 off the shape.
    double depth(std::span<double const> p) const;
    double diameter() const;
    /// Inradius: largest depth of any point.
    double inradius() const;
    /// Lattice bounding box of the dilation N * shape.
    LatticeBox lattice_hull(int N) const;
    /// Shape contained in `other` (exact for box/box and ball/ball,
    /// conservative otherwise).
    bool inside(Shape const& other) const;
};

/// Lattice points of N * V.
SetMask discrete_blowup(Shape const& shape, int N, LatticeBox const& host);
/// Lattice points of N * V^eps, V^eps = {x in V : dist(x, V^c) >= eps}.
SetMask epsilon_bulk(Shape const& shape, double eps, int N, LatticeBox const& host);

/// Box around `inner` padded so that its side is `factor` times the side
/// of `inner` (at least one extra layer on each side).
LatticeBox padded_box(LatticeBox const& inner, double factor);

/// Mask of all box vertices strictly inside the box (no host face).
SetMask interior_of(LatticeBox const& box);

}  // namespace hwgff
