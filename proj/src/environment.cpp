// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/environment.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "hwgff/rng.hpp"

namespace hwgff {

namespace {

constexpr char kEnvMagic[8] = {'H', 'W', 'G', 'F', 'E', 'N', 'V', '1'};
constexpr std::uint64_t kEdgeDomain = 0x65646765ULL;    // "edge"
constexpr std::uint64_t kVertexDomain = 0x76657274ULL;  // "vert"

std::uint64_t coordinate_key(std::uint64_t seed, std::uint64_t domain,
                             Coord const& x, int axis)
{
    std::uint64_t k = combine_keys(seed, domain);
    for (int c : x)
        k = combine_keys(k, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
    return combine_keys(k, static_cast<std::uint64_t>(axis + 1));
}

double keyed_uniform(std::uint64_t seed, std::uint64_t domain, Coord const& x, int axis)
{
    auto const block = Philox4x32::generate_block(
        combine_keys(seed, domain), coordinate_key(seed, domain, x, axis), 0);
    std::uint64_t const bits
        = ((static_cast<std::uint64_t>(block[0]) << 32) | block[1]) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double draw_base(EnvironmentSpec::Law law, EnvironmentSpec const& spec, double u)
{
    switch (law)
    {
        case EnvironmentSpec::Law::iid_uniform:
            return spec.lambda + (spec.Lambda - spec.lambda) * u;
        case EnvironmentSpec::Law::iid_two_point:
            return u < spec.p ? spec.lambda : spec.Lambda;
        default:
            break;
    }
    throw EnvironmentError("finite-range base law must be iid-uniform or iid-two-point");
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
        throw EnvironmentError("read_environment_binary: truncated stream");
    return v;
}

}  // namespace

//---------------------------------------------------------------------------//
EnvironmentSpec EnvironmentSpec::constant(double c)
{
    return constant(c, c, c);
}

EnvironmentSpec EnvironmentSpec::constant(double c, double lambda, double Lambda)
{
    EnvironmentSpec s;
    s.law = Law::constant;
    s.value = c;
    s.lambda = lambda;
    s.Lambda = Lambda;
    s.validate();
    return s;
}

EnvironmentSpec EnvironmentSpec::iid_uniform(double lambda, double Lambda, std::uint64_t seed)
{
    EnvironmentSpec s;
    s.law = Law::iid_uniform;
    s.lambda = lambda;
    s.Lambda = Lambda;
    s.seed = seed;
    s.validate();
    return s;
}

EnvironmentSpec EnvironmentSpec::iid_two_point(double lambda, double Lambda, double p,
                                               std::uint64_t seed)
{
    EnvironmentSpec s;
    s.law = Law::iid_two_point;
    s.lambda = lambda;
    s.Lambda = Lambda;
    s.p = p;
    s.seed = seed;
    s.validate();
    return s;
}

EnvironmentSpec EnvironmentSpec::finite_range_mixing(int range, EnvironmentSpec base_law)
{
    EnvironmentSpec s = base_law;
    s.base = base_law.law;
    s.law = Law::finite_range;
    s.range = range;
    s.validate();
    return s;
}

void EnvironmentSpec::validate() const
{
    if (!(lambda > 0.0) || !(lambda <= Lambda))
        throw EnvironmentError("environment: need 0 < lambda <= Lambda");
    switch (law)
    {
        case Law::constant:
            if (!(value >= lambda && value <= Lambda))
                throw EnvironmentError("constant(c): need lambda <= c <= Lambda");
            break;
        case Law::iid_uniform:
            break;
        case Law::iid_two_point:
            if (!(p >= 0.0 && p <= 1.0))
                throw EnvironmentError("iid-two-point: p must lie in [0, 1]");
            break;
        case Law::finite_range:
            if (range < 1)
                throw EnvironmentError("finite-range-mixing: range must be >= 1");
            if (base != Law::iid_uniform && base != Law::iid_two_point)
                throw EnvironmentError(
                    "finite-range-mixing: base law must be iid-uniform or iid-two-point");
            if (base == Law::iid_two_point && !(p >= 0.0 && p <= 1.0))
                throw EnvironmentError("iid-two-point: p must lie in [0, 1]");
            break;
    }
}

std::string to_string(EnvironmentSpec::Law law)
{
    switch (law)
    {
        case EnvironmentSpec::Law::constant: return "constant";
        case EnvironmentSpec::Law::iid_uniform: return "iid-uniform";
        case EnvironmentSpec::Law::iid_two_point: return "iid-two-point";
        case EnvironmentSpec::Law::finite_range: return "finite-range-mixing";
    }
    return "unknown";
}

EnvironmentSpec::Law law_from_string(std::string const& name)
{
    for (auto law : {EnvironmentSpec::Law::constant, EnvironmentSpec::Law::iid_uniform,
                     EnvironmentSpec::Law::iid_two_point,
                     EnvironmentSpec::Law::finite_range})
    {
        if (to_string(law) == name)
            return law;
    }
    throw EnvironmentError("unknown environment law '" + name + "'");
}

//---------------------------------------------------------------------------//
double edge_conductance(EnvironmentSpec const& spec, Coord const& lower, int axis)
{
    switch (spec.law)
    {
        case EnvironmentSpec::Law::constant:
            return spec.value;
        case EnvironmentSpec::Law::iid_uniform:
        case EnvironmentSpec::Law::iid_two_point:
            return draw_base(spec.law, spec, keyed_uniform(spec.seed, kEdgeDomain, lower, axis));
        case EnvironmentSpec::Law::finite_range: {
            // Mean of vertex draws over [lower - r, lower + e_axis + r].
            int const r = (spec.range - 1) / 2;
            int const d = static_cast<int>(lower.size());
            Coord lo(d), sides(d);
            for (int i = 0; i < d; ++i)
            {
                lo[i] = lower[i] - r;
                sides[i] = 2 * r + 1 + (i == axis ? 1 : 0);
            }
            LatticeBox const support(lo, sides);
            double sum = 0.0;
            for (std::size_t j = 0; j < support.volume(); ++j)
            {
                double const u = keyed_uniform(spec.seed, kVertexDomain, support.coord(j), -1);
                sum += draw_base(spec.base, spec, u);
            }
            double const w = sum / static_cast<double>(support.volume());
            return std::clamp(w, spec.lambda, spec.Lambda);
        }
    }
    throw EnvironmentError("edge_conductance: unknown law");
}

Environment sample_environment(EnvironmentSpec const& spec, LatticeBox const& host)
{
    spec.validate();
    return Environment::from_function(
        host, spec.lambda, spec.Lambda, spec,
        [&](Coord const& x, int axis) { return edge_conductance(spec, x, axis); });
}

//---------------------------------------------------------------------------//
double Environment::weight(Coord const& lower, int axis) const
{
    if (host_.contains(lower))
        return up(host_.index(lower), axis);
    Coord x = lower;
    x[axis] += 1;
    if (!host_.contains(x) || host_.coord(host_.index(x), axis) != host_.corner()[axis])
        throw EnvironmentError("Environment::weight: edge does not touch the host");
    return data_->low[axis][face_index(host_.index(x), axis)];
}

double Environment::mu(std::size_t idx) const
{
    double m = 0.0;
    for (int a = 0; a < dim(); ++a)
        m += up(idx, a) + down(idx, a);
    return m;
}

double Environment::min_weight() const
{
    double m = std::numeric_limits<double>::infinity();
    for (auto const& v : data_->up)
        m = std::min(m, *std::min_element(v.begin(), v.end()));
    for (auto const& v : data_->low)
        m = std::min(m, *std::min_element(v.begin(), v.end()));
    return m;
}

double Environment::max_weight() const
{
    double m = -std::numeric_limits<double>::infinity();
    for (auto const& v : data_->up)
        m = std::max(m, *std::max_element(v.begin(), v.end()));
    for (auto const& v : data_->low)
        m = std::max(m, *std::max_element(v.begin(), v.end()));
    return m;
}

Environment Environment::scaled(double c) const
{
    if (!(c > 0.0))
        throw EnvironmentError("Environment::scaled: factor must be positive");
    Environment env = *this;
    env.lambda_ *= c;
    env.Lambda_ *= c;
    env.spec_.lambda *= c;
    env.spec_.Lambda *= c;
    env.spec_.value *= c;
    auto data = std::make_shared<Data>(*data_);
    for (auto& v : data->up)
        for (double& w : v)
            w *= c;
    for (auto& v : data->low)
        for (double& w : v)
            w *= c;
    env.data_ = std::move(data);
    return env;
}

LatticeBox Environment::edge_box(int axis) const
{
    Coord corner = host_.corner();
    Coord sides = host_.sides();
    corner[axis] -= 1;
    sides[axis] += 1;
    return LatticeBox(corner, sides);
}

std::size_t Environment::edge_count() const
{
    std::size_t n = 0;
    for (int a = 0; a < dim(); ++a)
        n += edge_box(a).volume();
    return n;
}

std::vector<double> Environment::edges() const
{
    std::vector<double> out;
    out.reserve(edge_count());
    for (int a = 0; a < dim(); ++a)
    {
        LatticeBox const eb = edge_box(a);
        for (std::size_t j = 0; j < eb.volume(); ++j)
            out.push_back(weight(eb.coord(j), a));
    }
    return out;
}

Environment Environment::from_edges(LatticeBox host, EnvironmentSpec spec,
                                    std::vector<double> const& edges)
{
    Environment shell;
    shell.host_ = host;
    if (edges.size() != shell.edge_count())
        throw EnvironmentError("Environment::from_edges: edge count mismatch");
    std::vector<std::size_t> offsets(host.dim() + 1, 0);
    for (int a = 0; a < host.dim(); ++a)
        offsets[a + 1] = offsets[a] + shell.edge_box(a).volume();
    std::vector<LatticeBox> boxes;
    for (int a = 0; a < host.dim(); ++a)
        boxes.push_back(shell.edge_box(a));
    Environment env = from_function(
        std::move(host), spec.lambda, spec.Lambda, spec, [&](Coord const& x, int axis) {
            return edges[offsets[axis] + boxes[axis].index(x)];
        });
    double const lo = env.min_weight();
    double const hi = env.max_weight();
    if (lo < spec.lambda || hi > spec.Lambda)
        throw EnvironmentError("Environment::from_edges: weight outside [lambda, Lambda]");
    return env;
}

bool Environment::same_weights(Environment const& other) const
{
    if (!(host_ == other.host_))
        return false;
    return data_->up == other.data_->up && data_->low == other.data_->low;
}

//---------------------------------------------------------------------------//
void write_environment_binary(std::ostream& os, Environment const& env)
{
    os.write(kEnvMagic, sizeof(kEnvMagic));
    auto const& spec = env.spec();
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(env.dim()));
    for (int c : env.host().corner())
        put<std::int32_t>(os, c);
    for (int s : env.host().sides())
        put<std::int32_t>(os, s);
    put<double>(os, env.lambda());
    put<double>(os, env.Lambda());
    put<std::uint64_t>(os, spec.seed);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(spec.law));
    put<double>(os, spec.value);
    put<double>(os, spec.p);
    put<std::int32_t>(os, spec.range);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(spec.base));
    auto const edges = env.edges();
    put<std::uint64_t>(os, edges.size());
    os.write(reinterpret_cast<char const*>(edges.data()),
             static_cast<std::streamsize>(edges.size() * sizeof(double)));
}

Environment read_environment_binary(std::istream& is)
{
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kEnvMagic, sizeof(magic)) != 0)
        throw EnvironmentError("read_environment_binary: bad magic");
    if (get<std::uint32_t>(is) != 1)
        throw EnvironmentError("read_environment_binary: unsupported version");
    auto const d = static_cast<int>(get<std::uint32_t>(is));
    Coord corner(d), sides(d);
    for (int& c : corner)
        c = get<std::int32_t>(is);
    for (int& s : sides)
        s = get<std::int32_t>(is);
    EnvironmentSpec spec;
    spec.lambda = get<double>(is);
    spec.Lambda = get<double>(is);
    spec.seed = get<std::uint64_t>(is);
    spec.law = static_cast<EnvironmentSpec::Law>(get<std::uint32_t>(is));
    spec.value = get<double>(is);
    spec.p = get<double>(is);
    spec.range = get<std::int32_t>(is);
    spec.base = static_cast<EnvironmentSpec::Law>(get<std::uint32_t>(is));
    auto const n = get<std::uint64_t>(is);
    std::vector<double> edges(n);
    is.read(reinterpret_cast<char*>(edges.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is)
        throw EnvironmentError("read_environment_binary: truncated edge array");
    return Environment::from_edges(LatticeBox(corner, sides), spec, edges);
}

std::string environment_to_json(Environment const& env)
{
    nlohmann::json j;
    auto const& spec = env.spec();
    j["d"] = env.dim();
    j["corner"] = env.host().corner();
    j["sides"] = env.host().sides();
    j["lambda"] = env.lambda();
    j["Lambda"] = env.Lambda();
    j["seed"] = spec.seed;
    j["law"] = {{"name", to_string(spec.law)},
                {"value", spec.value},
                {"p", spec.p},
                {"range", spec.range},
                {"base", to_string(spec.base)}};
    j["edges"] = env.edges();
    return j.dump();
}

Environment environment_from_json(std::string const& text)
{
    auto const j = nlohmann::json::parse(text);
    Coord const corner = j.at("corner").get<Coord>();
    Coord const sides = j.at("sides").get<Coord>();
    if (static_cast<int>(corner.size()) != j.at("d").get<int>())
        throw EnvironmentError("environment_from_json: dimension mismatch");
    EnvironmentSpec spec;
    spec.lambda = j.at("lambda").get<double>();
    spec.Lambda = j.at("Lambda").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    auto const& law = j.at("law");
    spec.law = law_from_string(law.at("name").get<std::string>());
    spec.value = law.at("value").get<double>();
    spec.p = law.at("p").get<double>();
    spec.range = law.at("range").get<int>();
    spec.base = law_from_string(law.at("base").get<std::string>());
    return Environment::from_edges(LatticeBox(corner, sides), spec,
                                   j.at("edges").get<std::vector<double>>());
}

}  // namespace hwgff
