// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hwgff {

namespace {
constexpr double kGeomTol = 1e-12;
}

LatticeBox::LatticeBox(Coord corner, Coord sides)
    : corner_(std::move(corner)), sides_(std::move(sides))
{
    if (corner_.size() != sides_.size())
        throw GeometryError("LatticeBox: corner and sides differ in dimension");
    if (corner_.empty())
        throw GeometryError("LatticeBox: dimension must be >= 1");
    for (int s : sides_)
    {
        if (s < 1)
            throw GeometryError("LatticeBox: side lengths must be >= 1");
    }
    int const d = dim();
    strides_.assign(d, 1);
    for (int i = d - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * sides_[i + 1];
    volume_ = static_cast<std::size_t>(strides_[0]) * static_cast<std::size_t>(sides_[0]);
}

LatticeBox LatticeBox::ball(Coord const& center, int r)
{
    if (r < 0)
        throw GeometryError("LatticeBox::ball: negative radius");
    Coord corner(center.size());
    Coord sides(center.size(), 2 * r + 1);
    for (std::size_t i = 0; i < center.size(); ++i)
        corner[i] = center[i] - r;
    return LatticeBox(std::move(corner), std::move(sides));
}

LatticeBox build_box(int d, Coord const& corner, Coord const& sides)
{
    if (d < 1)
        throw GeometryError("build_box: dimension must be >= 1");
    if (static_cast<int>(corner.size()) != d || static_cast<int>(sides.size()) != d)
        throw GeometryError("build_box: dimension mismatch between corner and sides");
    return LatticeBox(corner, sides);
}

Coord LatticeBox::upper() const
{
    Coord u(corner_.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = corner_[i] + sides_[i] - 1;
    return u;
}

bool LatticeBox::contains(Coord const& x) const
{
    if (x.size() != corner_.size())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        if (x[i] < corner_[i] || x[i] >= corner_[i] + sides_[i])
            return false;
    }
    return true;
}

bool LatticeBox::contains(LatticeBox const& other) const
{
    if (other.dim() != dim())
        return false;
    for (int i = 0; i < dim(); ++i)
    {
        if (other.corner_[i] < corner_[i]
            || other.corner_[i] + other.sides_[i] > corner_[i] + sides_[i])
            return false;
    }
    return true;
}

std::size_t LatticeBox::index(Coord const& x) const
{
    if (!contains(x))
        throw GeometryError("LatticeBox::index: vertex outside box");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        idx += static_cast<std::size_t>(x[i] - corner_[i]) * static_cast<std::size_t>(strides_[i]);
    return idx;
}

Coord LatticeBox::coord(std::size_t idx) const
{
    Coord x(corner_.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        auto const s = static_cast<std::size_t>(strides_[i]);
        x[i] = corner_[i] + static_cast<int>(idx / s);
        idx %= s;
    }
    return x;
}

std::ptrdiff_t LatticeBox::neighbor(std::size_t idx, int axis, int sign) const
{
    int const c = coord(idx, axis) + sign;
    if (c < corner_[axis] || c >= corner_[axis] + sides_[axis])
        return -1;
    return static_cast<std::ptrdiff_t>(idx) + sign * strides_[axis];
}

bool LatticeBox::on_face(std::size_t idx) const
{
    for (int i = 0; i < dim(); ++i)
    {
        int const c = coord(idx, i);
        if (c == corner_[i] || c == corner_[i] + sides_[i] - 1)
            return true;
    }
    return false;
}

//---------------------------------------------------------------------------//
SetMask::SetMask(LatticeBox box) : box_(std::move(box)), bits_(box_.volume(), 0) {}

SetMask SetMask::full(LatticeBox const& box)
{
    SetMask m(box);
    std::fill(m.bits_.begin(), m.bits_.end(), 1);
    return m;
}

SetMask SetMask::from_box(LatticeBox const& host, LatticeBox const& sub)
{
    if (!host.contains(sub))
        throw GeometryError("SetMask::from_box: sub-box not inside host");
    SetMask m(host);
    for (std::size_t j = 0; j < sub.volume(); ++j)
        m.bits_[host.index(sub.coord(j))] = 1;
    return m;
}

SetMask SetMask::from_indices(LatticeBox const& host, std::span<std::size_t const> idx)
{
    SetMask m(host);
    for (std::size_t i : idx)
    {
        if (i >= host.volume())
            throw GeometryError("SetMask::from_indices: index out of range");
        m.bits_[i] = 1;
    }
    return m;
}

bool SetMask::contains(Coord const& x) const
{
    return box_.contains(x) && bits_[box_.index(x)] != 0;
}

std::size_t SetMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<std::size_t> SetMask::indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (bits_[i])
            out.push_back(i);
    }
    return out;
}

void SetMask::check_same_box(SetMask const& other) const
{
    if (!(box_ == other.box_))
        throw GeometryError("SetMask: operands live on different boxes");
}

bool SetMask::subset_of(SetMask const& other) const
{
    check_same_box(other);
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (bits_[i] && !other.bits_[i])
            return false;
    }
    return true;
}

bool SetMask::disjoint_from(SetMask const& other) const
{
    check_same_box(other);
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (bits_[i] && other.bits_[i])
            return false;
    }
    return true;
}

SetMask SetMask::united(SetMask const& other) const
{
    check_same_box(other);
    SetMask m(box_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        m.bits_[i] = bits_[i] | other.bits_[i];
    return m;
}

SetMask SetMask::intersected(SetMask const& other) const
{
    check_same_box(other);
    SetMask m(box_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        m.bits_[i] = bits_[i] & other.bits_[i];
    return m;
}

SetMask SetMask::minus(SetMask const& other) const
{
    check_same_box(other);
    SetMask m(box_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        m.bits_[i] = bits_[i] & static_cast<std::uint8_t>(!other.bits_[i]);
    return m;
}

SetMask SetMask::complement() const
{
    SetMask m(box_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        m.bits_[i] = static_cast<std::uint8_t>(!bits_[i]);
    return m;
}

SetMask SetMask::internal_boundary() const
{
    SetMask m(box_);
    int const d = box_.dim();
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (!bits_[i])
            continue;
        bool boundary = false;
        for (int a = 0; a < d && !boundary; ++a)
        {
            for (int s : {-1, 1})
            {
                auto const j = box_.neighbor(i, a, s);
                if (j < 0 || !bits_[static_cast<std::size_t>(j)])
                {
                    boundary = true;
                    break;
                }
            }
        }
        m.bits_[i] = boundary ? 1 : 0;
    }
    return m;
}

bool SetMask::touches_box_faces() const
{
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (bits_[i] && box_.on_face(i))
            return true;
    }
    return false;
}

SetMask SetMask::external_boundary() const
{
    if (touches_box_faces())
        throw GeometryError("external_boundary: set touches the faces of its box");
    SetMask m(box_);
    int const d = box_.dim();
    for (std::size_t i = 0; i < bits_.size(); ++i)
    {
        if (!bits_[i])
            continue;
        for (int a = 0; a < d; ++a)
        {
            for (int s : {-1, 1})
            {
                auto const j = static_cast<std::size_t>(box_.neighbor(i, a, s));
                if (!bits_[j])
                    m.bits_[j] = 1;
            }
        }
    }
    return m;
}

//---------------------------------------------------------------------------//
Shape Shape::box(std::vector<double> center, std::vector<double> half_widths)
{
    if (center.empty() || center.size() != half_widths.size())
        throw GeometryError("Shape::box: dimension mismatch");
    for (double h : half_widths)
    {
        if (!(h >= 0.0))
            throw GeometryError("Shape::box: negative half width");
    }
    Shape s;
    s.kind = Kind::box;
    s.center = std::move(center);
    s.half_widths = std::move(half_widths);
    return s;
}

Shape Shape::cube(int d, double half_width)
{
    return box(std::vector<double>(d, 0.0), std::vector<double>(d, half_width));
}

Shape Shape::ball(std::vector<double> center, double radius)
{
    if (center.empty())
        throw GeometryError("Shape::ball: empty center");
    if (!(radius >= 0.0))
        throw GeometryError("Shape::ball: negative radius");
    Shape s;
    s.kind = Kind::ball;
    s.center = std::move(center);
    s.radius = radius;
    return s;
}

Shape Shape::unit_ball(int d, double radius)
{
    return ball(std::vector<double>(d, 0.0), radius);
}

double Shape::depth(std::span<double const> p) const
{
    if (kind == Kind::ball)
    {
        double r2 = 0.0;
        for (int i = 0; i < dim(); ++i)
            r2 += (p[i] - center[i]) * (p[i] - center[i]);
        return radius - std::sqrt(r2);
    }
    double dep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i)
        dep = std::min(dep, half_widths[i] - std::abs(p[i] - center[i]));
    return dep;
}

bool Shape::contains(std::span<double const> p) const
{
    if (kind == Kind::ball)
    {
        double r2 = 0.0;
        for (int i = 0; i < dim(); ++i)
            r2 += (p[i] - center[i]) * (p[i] - center[i]);
        return r2 <= radius * radius * (1.0 + kGeomTol) + kGeomTol;
    }
    for (int i = 0; i < dim(); ++i)
    {
        if (std::abs(p[i] - center[i]) > half_widths[i] * (1.0 + kGeomTol) + kGeomTol)
            return false;
    }
    return true;
}

double Shape::diameter() const
{
    if (kind == Kind::ball)
        return 2.0 * radius;
    double s = 0.0;
    for (double h : half_widths)
        s += 4.0 * h * h;
    return std::sqrt(s);
}

double Shape::inradius() const
{
    if (kind == Kind::ball)
        return radius;
    return *std::min_element(half_widths.begin(), half_widths.end());
}

LatticeBox Shape::lattice_hull(int N) const
{
    int const d = dim();
    Coord lo(d), sides(d);
    for (int i = 0; i < d; ++i)
    {
        double const h = kind == Kind::ball ? radius : half_widths[i];
        double const a = N * (center[i] - h);
        double const b = N * (center[i] + h);
        int const l = static_cast<int>(std::ceil(a - kGeomTol * (1.0 + std::abs(a))));
        int const u = static_cast<int>(std::floor(b + kGeomTol * (1.0 + std::abs(b))));
        if (u < l)
        {
            // No lattice point along this axis; return a degenerate hull
            // around the rounded center so callers see an empty blow-up.
            lo[i] = static_cast<int>(std::lround(N * center[i]));
            sides[i] = 1;
            continue;
        }
        lo[i] = l;
        sides[i] = u - l + 1;
    }
    return LatticeBox(lo, sides);
}

bool Shape::inside(Shape const& other) const
{
    int const d = dim();
    if (other.dim() != d)
        return false;
    if (kind == Kind::box && other.kind == Kind::box)
    {
        for (int i = 0; i < d; ++i)
        {
            if (center[i] - half_widths[i] < other.center[i] - other.half_widths[i] - kGeomTol
                || center[i] + half_widths[i] > other.center[i] + other.half_widths[i] + kGeomTol)
                return false;
        }
        return true;
    }
    if (kind == Kind::ball && other.kind == Kind::ball)
    {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i)
            r2 += (center[i] - other.center[i]) * (center[i] - other.center[i]);
        return std::sqrt(r2) + radius <= other.radius + kGeomTol;
    }
    if (kind == Kind::ball)
    {
        // Ball inside box: the ball's bounding box must fit.
        return Shape::box(center, std::vector<double>(d, radius)).inside(other);
    }
    // Box inside ball: farthest corner must be inside.
    double r2 = 0.0;
    for (int i = 0; i < d; ++i)
    {
        double const far = std::abs(center[i] - other.center[i]) + half_widths[i];
        r2 += far * far;
    }
    return std::sqrt(r2) <= other.radius + kGeomTol;
}

namespace {

template <class Pred>
SetMask scaled_membership(Shape const& shape, int N, LatticeBox const& host, Pred&& pred)
{
    if (shape.dim() != host.dim())
        throw GeometryError("blow-up: shape and host dimension differ");
    if (N < 0)
        throw GeometryError("blow-up: N must be >= 0");
    SetMask m(host);
    if (N == 0)
    {
        Coord origin(host.dim(), 0);
        if (!host.contains(origin))
            throw GeometryError("blow-up: host does not contain the origin");
        m.insert(host.index(origin));
        return m;
    }
    LatticeBox const hull = shape.lattice_hull(N);
    std::vector<double> p(host.dim());
    bool any = false;
    for (std::size_t j = 0; j < hull.volume(); ++j)
    {
        Coord const x = hull.coord(j);
        for (int i = 0; i < host.dim(); ++i)
            p[i] = static_cast<double>(x[i]) / N;
        if (!pred(std::span<double const>(p)))
            continue;
        if (!host.contains(x))
            throw GeometryError("blow-up: host too small to contain N*V");
        m.insert(host.index(x));
        any = true;
    }
    (void)any;
    return m;
}

}  // namespace

SetMask discrete_blowup(Shape const& shape, int N, LatticeBox const& host)
{
    return scaled_membership(shape, N, host,
                             [&](std::span<double const> p) { return shape.contains(p); });
}

SetMask epsilon_bulk(Shape const& shape, double eps, int N, LatticeBox const& host)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw GeometryError("epsilon_bulk: eps must lie in (0, 1)");
    // Validate that the host contains the full blow-up first.
    SetMask const full = discrete_blowup(shape, N, host);
    if (N == 0)
        return full;
    SetMask m(host);
    std::vector<double> p(host.dim());
    for (std::size_t idx : full.indices())
    {
        Coord const x = host.coord(idx);
        for (int i = 0; i < host.dim(); ++i)
            p[i] = static_cast<double>(x[i]) / N;
        if (shape.depth(p) >= eps - kGeomTol)
            m.insert(idx);
    }
    return m;
}

LatticeBox padded_box(LatticeBox const& inner, double factor)
{
    if (!(factor >= 1.0))
        throw GeometryError("padded_box: factor must be >= 1");
    int const d = inner.dim();
    Coord corner(d), sides(d);
    for (int i = 0; i < d; ++i)
    {
        int const s = inner.sides()[i];
        int extra = static_cast<int>(std::ceil((factor - 1.0) * s / 2.0));
        extra = std::max(extra, 1);
        corner[i] = inner.corner()[i] - extra;
        sides[i] = s + 2 * extra;
    }
    return LatticeBox(corner, sides);
}

SetMask interior_of(LatticeBox const& box)
{
    SetMask m(box);
    for (std::size_t i = 0; i < box.volume(); ++i)
    {
        if (!box.on_face(i))
            m.insert(i);
    }
    return m;
}

}  // namespace hwgff
