// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hwgff/lattice.hpp"

namespace hwgff {

class EnvironmentError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
/*!
 * Law of the random conductances together with its seed.
 *
 * `finite_range` averages i.i.d. vertex values of the base law over an
 * l-infinity neighbourhood of each edge, so that edges farther apart than
 * `range` are built from disjoint sets of vertex draws.
 */
struct EnvironmentSpec
{
    enum class Law
    {
        constant,
        iid_uniform,
        iid_two_point,
        finite_range
    };

    Law law = Law::constant;
    double lambda = 1.0;
    double Lambda = 1.0;
    double value = 1.0;        // constant law
    double p = 0.5;            // two-point: probability of lambda
    int range = 1;             // finite range
    Law base = Law::iid_uniform;  // finite range base law
    std::uint64_t seed = 0;

    static EnvironmentSpec constant(double c);
    static EnvironmentSpec constant(double c, double lambda, double Lambda);
    static EnvironmentSpec iid_uniform(double lambda, double Lambda, std::uint64_t seed);
    static EnvironmentSpec iid_two_point(double lambda, double Lambda, double p, std::uint64_t seed);
    static EnvironmentSpec finite_range_mixing(int range, EnvironmentSpec base_law);

    /// Throws EnvironmentError listing the first violated constraint.
    void validate() const;
};

std::string to_string(EnvironmentSpec::Law law);
EnvironmentSpec::Law law_from_string(std::string const& name);

//---------------------------------------------------------------------------//
/*!
 * Conductances of every nearest-neighbour edge with at least one endpoint in
 * the host box.
 *
 * Storage is host-aligned: `up(idx, axis)` is the weight of the edge from
 * vertex `idx` to its +axis neighbour, and edges entering the host through
 * its lower faces are kept in per-axis face arrays. Copies share the
 * immutable weight storage.
 */
class Environment
{
  public:
    Environment() = default;

    /// Build from a function of (lower endpoint, axis).
    template <class F>
    static Environment from_function(LatticeBox host, double lambda, double Lambda,
                                     EnvironmentSpec spec, F&& weight);
    /// Build from the serialized edge order (see `edges()`).
    static Environment from_edges(LatticeBox host, EnvironmentSpec spec,
                                  std::vector<double> const& edges);

    LatticeBox const& host() const { return host_; }
    int dim() const { return host_.dim(); }
    double lambda() const { return lambda_; }
    double Lambda() const { return Lambda_; }
    EnvironmentSpec const& spec() const { return spec_; }

    double up(std::size_t idx, int axis) const { return data_->up[axis][idx]; }
    double down(std::size_t idx, int axis) const
    {
        if (host_.coord(idx, axis) > host_.corner()[axis])
            return data_->up[axis][idx - static_cast<std::size_t>(host_.stride(axis))];
        return data_->low[axis][face_index(idx, axis)];
    }
    /// Weight of {x, x + e_axis}; one endpoint must be in the host.
    double weight(Coord const& lower, int axis) const;
    /// mu_x = sum of the 2d incident weights.
    double mu(std::size_t idx) const;

    double min_weight() const;
    double max_weight() const;
    /// Environment with every conductance multiplied by c > 0.
    Environment scaled(double c) const;

    /// All stored weights: for each axis, the edges {v, v + e_axis} with v
    /// running in row-major order over the host extended by one layer below
    /// along that axis.
    std::vector<double> edges() const;
    std::size_t edge_count() const;

    bool same_weights(Environment const& other) const;

  private:
    struct Data
    {
        std::vector<std::vector<double>> up;
        std::vector<std::vector<double>> low;
    };

    std::size_t face_index(std::size_t idx, int axis) const
    {
        auto const s = static_cast<std::size_t>(host_.stride(axis));
        auto const block = s * static_cast<std::size_t>(host_.sides()[axis]);
        return (idx / block) * s + idx % s;
    }
    LatticeBox edge_box(int axis) const;

    LatticeBox host_;
    double lambda_ = 1.0;
    double Lambda_ = 1.0;
    EnvironmentSpec spec_;
    std::shared_ptr<Data const> data_;
};

/// Deterministic function of (spec, host); overlapping hosts agree on
/// shared edges.
Environment sample_environment(EnvironmentSpec const& spec, LatticeBox const& host);

/// Conductance of a single edge under the spec's law, keyed on absolute
/// coordinates.
double edge_conductance(EnvironmentSpec const& spec, Coord const& lower, int axis);

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//
void write_environment_binary(std::ostream& os, Environment const& env);
Environment read_environment_binary(std::istream& is);
std::string environment_to_json(Environment const& env);
Environment environment_from_json(std::string const& text);

//---------------------------------------------------------------------------//
template <class F>
Environment Environment::from_function(LatticeBox host, double lambda, double Lambda,
                                       EnvironmentSpec spec, F&& weight)
{
    Environment env;
    env.host_ = std::move(host);
    env.lambda_ = lambda;
    env.Lambda_ = Lambda;
    env.spec_ = spec;
    auto data = std::make_shared<Data>();
    int const d = env.host_.dim();
    data->up.resize(d);
    data->low.resize(d);
    for (int a = 0; a < d; ++a)
    {
        auto& up = data->up[a];
        up.resize(env.host_.volume());
        for (std::size_t i = 0; i < up.size(); ++i)
            up[i] = weight(env.host_.coord(i), a);
        auto& low = data->low[a];
        low.resize(env.host_.volume() / static_cast<std::size_t>(env.host_.sides()[a]));
        for (std::size_t i = 0; i < env.host_.volume(); ++i)
        {
            if (env.host_.coord(i, a) != env.host_.corner()[a])
                continue;
            Coord x = env.host_.coord(i);
            x[a] -= 1;
            low[env.face_index(i, a)] = weight(x, a);
        }
    }
    env.data_ = std::move(data);
    return env;
}

}  // namespace hwgff
