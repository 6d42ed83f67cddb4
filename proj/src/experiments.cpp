// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include "hwgff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "hwgff/coarse.hpp"
#include "hwgff/gff.hpp"
#include "hwgff/hardwall.hpp"
#include "hwgff/homog.hpp"
#include "hwgff/potential.hpp"
#include "hwgff/rng.hpp"

namespace hwgff {

char const* const kVersion = "hwgff 1.0.0";

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string s = "invalid configuration:";
        for (auto const& e : errors)
            s += "\n  " + e;
        return s;
    }())
    , errors_(std::move(errors))
{
}

std::vector<std::string> const& experiment_kinds()
{
    static std::vector<std::string> const k = {
        "green-oracle",       "gff-covariance",      "capacity-scaling",
        "gbar",               "hardwall-prob",       "repulsion-profile",
        "coarse-diagnostics", "solidification",      "convergence-suite"};
    return k;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json estimate_json(Estimate const& e)
{
    return json{{"value", e.value}, {"se", e.se}, {"n", e.n}};
}

bool RunArtifacts::passed(bool strict) const
{
    return std::all_of(assertions.begin(), assertions.end(),
                       [&](Assertion const& a) { return a.passed || (a.gate && !strict); });
}

//---------------------------------------------------------------------------//
// Configuration
//---------------------------------------------------------------------------//
namespace {

class Reader
{
  public:
    Reader(json const& j, std::string prefix, std::vector<std::string>& errors)
        : j_(j), prefix_(std::move(prefix)), errors_(errors)
    {
    }

    template <class T>
    void get(char const* key, T& out)
    {
        seen_.insert(key);
        if (!j_.contains(key) || j_[key].is_null())
            return;
        try
        {
            if constexpr (std::is_same_v<T, double>)
            {
                if (!j_[key].is_number())
                    throw std::invalid_argument("number expected");
            }
            else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>)
            {
                if (!j_[key].is_number_integer() && !j_[key].is_number_unsigned())
                    throw std::invalid_argument("integer expected");
                if constexpr (std::is_unsigned_v<T>)
                    if (j_[key].is_number_integer() && j_[key].template get<long long>() < 0)
                        throw std::invalid_argument("nonnegative integer expected");
            }
            out = j_[key].template get<T>();
        }
        catch (std::exception const& e)
        {
            errors_.push_back(path(key) + ": " + e.what());
        }
    }

    template <class T>
    void get(char const* key, std::optional<T>& out)
    {
        seen_.insert(key);
        if (!j_.contains(key) || j_[key].is_null())
            return;
        T v{};
        get(key, v);
        out = v;
    }

    json const* sub(char const* key)
    {
        seen_.insert(key);
        if (!j_.contains(key) || j_[key].is_null())
            return nullptr;
        if (!j_[key].is_object())
        {
            errors_.push_back(path(key) + ": object expected");
            return nullptr;
        }
        return &j_[key];
    }

    /// Flag every key not read.
    void finish()
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                errors_.push_back(path(it.key()) + ": unknown field");
    }

    std::string path(std::string const& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
    void error(std::string const& key, std::string const& msg) { errors_.push_back(path(key) + ": " + msg); }

  private:
    json const& j_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

json spec_json(EnvironmentSpec const& s)
{
    return json{{"law", to_string(s.law)},   {"value", s.value}, {"lambda", s.lambda},
                {"Lambda", s.Lambda},        {"p", s.p},         {"range", s.range},
                {"base", to_string(s.base)}, {"seed", s.seed}};
}

json shape_json(Shape const& s)
{
    json j{{"type", s.kind == Shape::Kind::box ? "box" : "ball"}, {"center", s.center}};
    if (s.kind == Shape::Kind::box)
        j["half_widths"] = s.half_widths;
    else
        j["radius"] = s.radius;
    return j;
}

}  // namespace

ExperimentConfig parse_config(json const& j)
{
    std::vector<std::string> errs;
    if (!j.is_object())
        throw ConfigError({"<root>: object expected"});
    ExperimentConfig c;
    Reader r(j, "", errs);
    r.get("kind", c.kind);
    auto const& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
        r.error("kind", "unknown experiment kind '" + c.kind + "'");
    r.get("d", c.d);
    if (c.d < 3 || c.d > 5)
        r.error("d", "dimension must lie in [3, 5]");
    r.get("N", c.N);
    if (c.N < 1)
        r.error("N", "must be >= 1");
    r.get("ladder", c.ladder);
    for (std::size_t i = 0; i < c.ladder.size(); ++i)
    {
        if (c.ladder[i] < 1)
            r.error("ladder", "entries must be >= 1");
        if (i > 0 && c.ladder[i] <= c.ladder[i - 1])
            r.error("ladder", "must be strictly increasing");
    }

    int const d = std::clamp(c.d, 1, 5);
    c.shape = Shape::cube(d, 1.0);
    if (json const* s = r.sub("shape"))
    {
        Reader rs(*s, "shape", errs);
        std::string type = "box";
        std::vector<double> center(d, 0.0);
        std::optional<double> hw, radius;
        std::vector<double> hws;
        rs.get("type", type);
        rs.get("center", center);
        rs.get("half_width", hw);
        rs.get("half_widths", hws);
        rs.get("radius", radius);
        rs.finish();
        if (static_cast<int>(center.size()) != d)
        {
            rs.error("center", "must have d entries");
            center.assign(d, 0.0);
        }
        if (type == "box")
        {
            if (hws.empty())
                hws.assign(d, hw.value_or(1.0));
            if (static_cast<int>(hws.size()) != d)
            {
                rs.error("half_widths", "must have d entries");
                hws.assign(d, 1.0);
            }
            if (std::any_of(hws.begin(), hws.end(), [](double h) { return !(h > 0.0); }))
                rs.error("half_widths", "must be positive");
            else
                c.shape = Shape::box(center, hws);
        }
        else if (type == "ball")
        {
            double const rad = radius.value_or(1.0);
            if (!(rad > 0.0))
                rs.error("radius", "must be positive");
            else
                c.shape = Shape::ball(center, rad);
        }
        else
        {
            rs.error("type", "must be 'box' or 'ball'");
        }
    }

    if (json const* e = r.sub("environment"))
    {
        Reader re(*e, "environment", errs);
        std::string law = "constant", base = "iid-uniform";
        auto& s = c.env;
        std::optional<double> lam, Lam;
        re.get("law", law);
        re.get("value", s.value);
        re.get("lambda", lam);
        re.get("Lambda", Lam);
        re.get("p", s.p);
        re.get("range", s.range);
        re.get("base", base);
        re.get("seed", s.seed);
        re.finish();
        try
        {
            s.law = law_from_string(law);
        }
        catch (std::exception const& ex)
        {
            re.error("law", ex.what());
        }
        try
        {
            s.base = law_from_string(base);
        }
        catch (std::exception const& ex)
        {
            re.error("base", ex.what());
        }
        if (s.law == EnvironmentSpec::Law::constant)
        {
            s.lambda = lam.value_or(s.value);
            s.Lambda = Lam.value_or(s.value);
        }
        else
        {
            s.lambda = lam.value_or(1.0);
            s.Lambda = Lam.value_or(2.0);
        }
        try
        {
            s.validate();
        }
        catch (std::exception const& ex)
        {
            re.error("law", ex.what());
        }
    }

    if (json const* h = r.sub("hardwall"))
    {
        Reader rh(*h, "hardwall", errs);
        rh.get("g_hat", c.g_hat);
        rh.get("delta", c.delta);
        rh.get("eps", c.eps);
        rh.get("K", c.K);
        rh.get("rho", c.rho);
        rh.get("beta", c.beta);
        rh.get("L", c.L);
        rh.finish();
        if (c.g_hat && !(*c.g_hat > 0.0))
            rh.error("g_hat", "must be positive");
        if (!(c.delta > 0.0))
            rh.error("delta", "must be positive");
        if (!(c.eps > 0.0 && c.eps < 1.0))
            rh.error("eps", "must lie in (0, 1)");
        if (c.K < 2)
            rh.error("K", "must be >= 2");
        if (!(c.rho >= 0.0 && c.rho < 1.0))
            rh.error("rho", "must lie in [0, 1)");
        if (c.beta < 0.0)
            rh.error("beta", "must be nonnegative");
        if (c.L && *c.L < 1)
            rh.error("L", "must be >= 1");
    }

    if (json const* m = r.sub("mcmc"))
    {
        Reader rm(*m, "mcmc", errs);
        rm.get("burn_in", c.burn_in);
        rm.get("sweeps", c.sweeps);
        rm.get("batches", c.batches);
        rm.get("replicas", c.replicas);
        rm.get("samples", c.samples);
        rm.finish();
        if (c.batches < 20)
            rm.error("batches", "must be >= 20");
        if (c.sweeps < c.batches)
            rm.error("sweeps", "must be >= batches");
        if (c.replicas < 1)
            rm.error("replicas", "must be >= 1");
        if (c.samples < 2)
            rm.error("samples", "must be >= 2");
    }

    r.get("padding", c.padding);
    if (!(c.padding >= 1.0))
        r.error("padding", "must be >= 1");
    r.get("padding_ladder", c.padding_ladder);
    if (std::any_of(c.padding_ladder.begin(), c.padding_ladder.end(), [](double f) { return !(f >= 2.0); }))
        r.error("padding_ladder", "factors must be >= 2");

    if (json const* t = r.sub("tolerances"))
    {
        Reader rt(*t, "tolerances", errs);
        rt.get("k_se", c.k_se);
        rt.get("trend_se", c.trend_se);
        rt.finish();
        if (!(c.k_se > 0.0))
            rt.error("k_se", "must be positive");
        if (!(c.trend_se >= 0.0))
            rt.error("trend_se", "must be nonnegative");
    }
    if (json const* b = r.sub("budget"))
    {
        Reader rb(*b, "budget", errs);
        rb.get("max_host_volume", c.max_host_volume);
        rb.finish();
        if (c.max_host_volume < 1)
            rb.error("max_host_volume", "must be positive");
    }
    r.get("output", c.output);
    r.get("write_binaries", c.write_binaries);
    r.get("seed", c.seed);
    r.finish();

    if (c.shape.dim() != c.d && errs.empty())
        errs.push_back("shape: dimension differs from d");
    if (!errs.empty())
        throw ConfigError(std::move(errs));
    return c;
}

json config_to_json(ExperimentConfig const& c)
{
    json j;
    j["kind"] = c.kind;
    j["d"] = c.d;
    j["N"] = c.N;
    j["ladder"] = c.ladder;
    j["shape"] = shape_json(c.shape);
    j["environment"] = spec_json(c.env);
    j["hardwall"] = json{{"g_hat", c.g_hat ? json(*c.g_hat) : json(nullptr)},
                         {"delta", c.delta},
                         {"eps", c.eps},
                         {"K", c.K},
                         {"rho", c.rho},
                         {"beta", c.beta},
                         {"L", c.L ? json(*c.L) : json(nullptr)}};
    j["mcmc"] = json{{"burn_in", c.burn_in},
                     {"sweeps", c.sweeps},
                     {"batches", c.batches},
                     {"replicas", c.replicas},
                     {"samples", c.samples}};
    j["padding"] = c.padding;
    j["padding_ladder"] = c.padding_ladder;
    j["tolerances"] = json{{"k_se", c.k_se}, {"trend_se", c.trend_se}};
    j["budget"] = json{{"max_host_volume", c.max_host_volume}};
    j["output"] = c.output;
    j["write_binaries"] = c.write_binaries;
    j["seed"] = c.seed;
    return j;
}

double default_g_hat(EnvironmentSpec const& spec, int d)
{
    return ball_green_diagonal(EnvironmentSpec::constant(1.0), d, 8) / spec.lambda;
}

//---------------------------------------------------------------------------//
// Shared plumbing
//---------------------------------------------------------------------------//
namespace {

std::uint64_t experiment_id(std::string const& kind)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : kind)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of replica stream r; independent of scheduling.
std::uint64_t stream_seed(ExperimentConfig const& c, std::uint64_t r)
{
    return combine_keys(combine_keys(c.seed, experiment_id(c.kind)), r);
}

EnvironmentSpec env_for(ExperimentConfig const& c, std::uint64_t r)
{
    EnvironmentSpec s = c.env;
    s.seed = combine_keys(stream_seed(c, r), c.env.seed);
    return s;
}

std::vector<int> ladder_or(ExperimentConfig const& c, std::vector<int> fallback)
{
    return c.ladder.empty() ? fallback : c.ladder;
}

void check_budget(ExperimentConfig const& c, std::size_t volume, std::string const& what)
{
    if (volume > c.max_host_volume)
        throw ResourceError(what + ": host volume " + std::to_string(volume)
                            + " exceeds budget " + std::to_string(c.max_host_volume));
}

struct WallGeometry
{
    LatticeBox host;
    LatticeBox ubox;
};

WallGeometry wall_geometry(Shape const& shape, int N, double padding)
{
    WallGeometry g;
    g.ubox = padded_box(shape.lattice_hull(N), padding);
    g.host = padded_box(g.ubox, 1.0);
    return g;
}

struct Csv
{
    RunArtifacts& art;
    void header(std::vector<std::string> h) { art.csv_header = std::move(h); }
    template <class... T>
    void row(T const&... v)
    {
        std::vector<std::string> r;
        (r.push_back(cell(v)), ...);
        art.csv_rows.push_back(std::move(r));
    }
    static std::string cell(std::string const& s) { return s; }
    static std::string cell(char const* s) { return s; }
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    template <class I>
    static std::enable_if_t<std::is_integral_v<I>, std::string> cell(I v)
    {
        return std::to_string(v);
    }
};

void add(RunArtifacts& art, std::string name, bool passed, std::string detail = {}, bool gate = false)
{
    art.assertions.push_back(Assertion{std::move(name), passed, gate, std::move(detail)});
}

std::string binary_bytes(std::function<void(std::ostream&)> const& f)
{
    std::ostringstream os(std::ios::binary);
    f(os);
    return os.str();
}

//---------------------------------------------------------------------------//
RunArtifacts run_green_oracle(ExperimentConfig const& c, std::size_t workers)
{
    LatticeBox const host(Coord(c.d, 0), Coord(c.d, c.N + 2));
    SetMask const U = interior_of(host);
    check_budget(c, host.volume(), "green-oracle");
    if (U.count() > 4096)
        throw ResourceError("green-oracle: dense oracle limited to 4096 vertices");

    struct Rep
    {
        double max_diff;
        std::uint64_t seed;
    };
    auto reps = parallel_map<Rep>(c.replicas, workers, [&](std::size_t r) {
        EnvironmentSpec const spec = env_for(c, r);
        Environment const env = sample_environment(spec, host);
        auto const op = PrecisionOperator::assemble(env, U);
        Eigen::MatrixXd const G = op.dense().llt().solve(
            Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(op.size()),
                                      static_cast<Eigen::Index>(op.size())));
        SolverOptions cg;
        cg.kind = SolverOptions::Kind::cg;
        cg.rel_tol = 1e-13;
        SpdSolver const solver(op, cg);
        double m = 0.0;
        for (std::size_t k = 0; k < op.size(); ++k)
        {
            Field const col = killed_green_column(solver, op.active()[k]);
            for (std::size_t i = 0; i < op.size(); ++i)
                m = std::max(m, std::abs(col.values[op.active()[i]]
                                         - G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))));
        }
        return Rep{m, spec.seed};
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"replica", "env_seed", "n", "max_abs_diff"});
    double worst = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r)
    {
        csv.row(r, reps[r].seed, U.count(), reps[r].max_diff);
        worst = std::max(worst, reps[r].max_diff);
    }
    art.report = json{{"n", U.count()}, {"replicas", c.replicas}, {"max_abs_diff", worst}};
    add(art, "dense-iterative agreement 1e-8", worst <= 1e-8, format_double(worst));
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_gff_covariance(ExperimentConfig const& c, std::size_t workers)
{
    LatticeBox const host(Coord(c.d, 0), Coord(c.d, c.N + 2));
    SetMask const U = interior_of(host);
    check_budget(c, host.volume(), "gff-covariance");
    Environment const env = sample_environment(env_for(c, 0), host);
    auto const op = PrecisionOperator::assemble(env, U);
    std::size_t const n = op.size();
    std::size_t const npairs = n * (n + 1) / 2;
    if (npairs > (std::size_t{1} << 24))
        throw ResourceError("gff-covariance: too many covariance entries");
    GffSampler const base(op, stream_seed(c, 0));

    struct Sums
    {
        std::vector<double> s1, s2;
        std::size_t count;
    };
    std::size_t const per = c.samples / c.replicas;
    auto parts = parallel_map<Sums>(c.replicas, workers, [&](std::size_t r) {
        std::size_t const m = per + (r == 0 ? c.samples % c.replicas : 0);
        GffSampler s = base.with_seed(stream_seed(c, 1 + r));
        Sums out{std::vector<double>(npairs, 0.0), std::vector<double>(npairs, 0.0), m};
        std::vector<double> x(n);
        for (std::size_t t = 0; t < m; ++t)
        {
            s.sample_local(x);
            std::size_t p = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j, ++p)
                {
                    double const v = x[i] * x[j];
                    out.s1[p] += v;
                    out.s2[p] += v * v;
                }
        }
        return out;
    });
    std::vector<double> s1(npairs, 0.0), s2(npairs, 0.0);
    std::size_t total = 0;
    for (auto const& part : parts)
    {
        for (std::size_t p = 0; p < npairs; ++p)
        {
            s1[p] += part.s1[p];
            s2[p] += part.s2[p];
        }
        total += part.count;
    }

    SpdSolver const solver(op);
    RunArtifacts art;
    Csv csv{art};
    csv.header({"x", "y", "cov", "se", "n", "green", "z"});
    double zmax = 0.0;
    std::size_t p = 0, outside = 0;
    double const nn = static_cast<double>(total);
    for (std::size_t i = 0; i < n; ++i)
    {
        Field const g = killed_green_column(solver, op.active()[i]);
        for (std::size_t j = i; j < n; ++j, ++p)
        {
            double const mean = s1[p] / nn;
            double const var = std::max(0.0, s2[p] / nn - mean * mean) * nn / (nn - 1.0);
            double const se = std::sqrt(var / nn);
            double const gv = g.values[op.active()[j]];
            double const z = se > 0 ? (mean - gv) / se : 0.0;
            zmax = std::max(zmax, std::abs(z));
            outside += std::abs(z) > c.k_se;
            csv.row(op.active()[i], op.active()[j], mean, se, total, gv, z);
        }
    }
    art.report = json{{"n", n},
                      {"samples", total},
                      {"entries", npairs},
                      {"max_abs_z", zmax},
                      {"entries_outside", outside},
                      {"factor_residual", base.factor_residual()}};
    add(art, "covariance within k SE of Green", outside == 0,
        std::to_string(outside) + " of " + std::to_string(npairs) + " outside");
    if (c.write_binaries)
        art.binaries.emplace_back("environment.bin", binary_bytes([&](std::ostream& os) {
                                      write_environment_binary(os, env);
                                  }));
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_capacity_scaling(ExperimentConfig const& c, std::size_t)
{
    ScalingStudy st;
    st.env = env_for(c, 0);
    st.shape = c.shape;
    st.ladder = ladder_or(c, {4, 8, 16});
    st.replications = c.replicas;
    st.padding = c.padding;
    st.seed = stream_seed(c, 1);
    for (int N : st.ladder)
        check_budget(c, padded_box(killing_box(c.shape, N, c.padding), 1.0).volume(), "capacity-scaling");
    ScalingResult const res = capacity_scaling(st);

    RunArtifacts art;
    Csv csv{art};
    csv.header({"N", "value", "bound", "mean", "se", "n", "spread"});
    json rows = json::array();
    for (auto const& r : res.rows)
    {
        csv.row(r.N, r.value, r.bound, r.replicated.value, r.replicated.se, r.replicated.n, r.spread);
        rows.push_back(json{{"N", r.N}, {"value", r.value}, {"bound", r.bound},
                            {"replicated", estimate_json(r.replicated)}, {"spread", r.spread}});
    }
    art.report = json{{"rows", rows},
                      {"differences", res.differences},
                      {"extrapolated", res.extrapolated},
                      {"cauchy", res.cauchy}};
    if (res.rows.size() >= 3)
        add(art, "rescaled capacity Cauchy", res.cauchy);
    add(art, "capacities positive",
        std::all_of(res.rows.begin(), res.rows.end(), [](ScalingRow const& r) { return r.value > 0; }));
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_gbar(ExperimentConfig const& c, std::size_t)
{
    int const R = std::max(2, c.N);
    check_budget(c, LatticeBox::ball(Coord(c.d, 0), R + 1).volume(), "gbar");
    GbarResult const g = gbar_estimate(c.env, c.d, R, c.replicas, stream_seed(c, 0));
    GbarIdentity const id = gbar_identity_check(c.env.lambda, c.env.Lambda, c.d, R);

    RunArtifacts art;
    Csv csv{art};
    csv.header({"env", "g", "running_max", "g_lambda"});
    bool nondecreasing = true;
    for (std::size_t i = 0; i < g.values.size(); ++i)
    {
        csv.row(i, g.values[i], g.running_max[i], id.g_lambda);
        if (i > 0)
            nondecreasing = nondecreasing && g.running_max[i] >= g.running_max[i - 1];
    }
    art.report = json{{"R", R},
                      {"mean", estimate_json(g.mean)},
                      {"max", g.max},
                      {"g_lambda", id.g_lambda},
                      {"g_unit", id.g_unit},
                      {"ratio", id.ratio},
                      {"rel_error", id.rel_error},
                      {"deltas", id.deltas},
                      {"lower_bounds", id.lower_bounds}};
    add(art, "lambda-constant identity 1e-10", id.rel_error <= 1e-10, format_double(id.rel_error));
    add(art, "running max nondecreasing", nondecreasing);
    add(art, "max bounded by lambda-constant value", g.max <= id.g_lambda + 1e-10,
        format_double(g.max - id.g_lambda));
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_hardwall_prob(ExperimentConfig const& c, std::size_t workers)
{
    WallGeometry const geo = wall_geometry(c.shape, c.N, c.padding);
    check_budget(c, geo.host.volume(), "hardwall-prob");
    Environment const env = sample_environment(env_for(c, 0), geo.host);
    SetMask const wall = discrete_blowup(c.shape, c.N, geo.host);
    SetMask const U = SetMask::from_box(geo.host, geo.ubox);
    auto const problem = HardWallProblem::create(env, U, wall, c.N, *c.g_hat);

    std::vector<LogProbMethod> const methods = {LogProbMethod::direct, LogProbMethod::tilted,
                                                LogProbMethod::fkg_bound};
    auto res = parallel_map<LogProbResult>(methods.size(), workers, [&](std::size_t i) {
        return hardwall_logprob(problem, methods[i], c.samples, stream_seed(c, 1 + i));
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"method", "log_prob", "se", "n", "hits", "ess"});
    json rows = json::array();
    for (auto const& r : res)
    {
        csv.row(to_string(r.method), r.log_prob.value, r.log_prob.se, r.log_prob.n, r.hits, r.ess);
        rows.push_back(json{{"method", to_string(r.method)},
                            {"log_prob", estimate_json(r.log_prob)},
                            {"hits", r.hits},
                            {"ess", r.ess},
                            {"mean_log_weight", estimate_json(r.mean_log_weight)},
                            {"tilt_energy", r.tilt_energy}});
    }
    auto const& direct = res[0].log_prob;
    auto const& tilted = res[1].log_prob;
    double const floor = res[2].log_prob.value;
    art.report = json{{"wall_size", wall.count()}, {"U_size", U.count()}, {"alpha", problem.alpha()},
                      {"g_hat", problem.g_hat}, {"methods", rows}};
    for (int i = 0; i < 2; ++i)
    {
        auto const& e = res[i].log_prob;
        add(art, to_string(res[i].method) + " above FKG floor", e.value >= floor - c.k_se * e.se,
            format_double(e.value - floor));
    }
    bool const finite = std::isfinite(direct.value) && std::isfinite(tilted.value);
    add(art, "direct and tilted agree within k joint SE", finite && within_joint_se(direct, tilted, c.k_se),
        format_double(direct.value - tilted.value));
    std::vector<std::size_t> const w = wall.indices();
    if (w.size() == 1 || w.size() == 2)
    {
        double exact = std::log(0.5);
        if (w.size() == 2)
        {
            SpdSolver const solver(problem.op);
            Field const g0 = killed_green_column(solver, w[0]);
            Field const g1 = killed_green_column(solver, w[1]);
            double const rho = g0.values[w[1]] / std::sqrt(g0.values[w[0]] * g1.values[w[1]]);
            exact = std::log(0.25 + std::asin(rho) / (2.0 * std::numbers::pi));
        }
        art.report["exact"] = exact;
        add(art, "direct matches exact orthant probability",
            std::abs(direct.value - exact) <= c.k_se * direct.se, format_double(direct.value - exact));
    }
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_repulsion_profile(ExperimentConfig const& c, std::size_t workers)
{
    std::vector<int> const ladder = ladder_or(c, {4, 6, 8});
    for (int N : ladder)
        check_budget(c, wall_geometry(c.shape, N, c.padding).host.volume(), "repulsion-profile");

    struct Rep
    {
        int N;
        std::size_t wall, U;
        RepulsionProfile prof;
        ChainOutput out;
        std::string env_bin, mean_bin;
    };
    auto reps = parallel_map<Rep>(ladder.size(), workers, [&](std::size_t i) {
        int const N = ladder[i];
        WallGeometry const geo = wall_geometry(c.shape, N, c.padding);
        Environment const env = sample_environment(env_for(c, 0), geo.host);
        SetMask const wall = discrete_blowup(c.shape, N, geo.host);
        SetMask const U = SetMask::from_box(geo.host, geo.ubox);
        auto const problem = HardWallProblem::create(env, U, wall, N, *c.g_hat);
        ChainOptions co;
        co.burn_in = c.burn_in;
        co.n_sweeps = c.sweeps;
        co.n_batches = c.batches;
        co.seed = stream_seed(c, 1 + i);
        Rep rep{N, wall.count(), U.count(), {}, run_chain(problem, co), {}, {}};
        rep.prof = repulsion_profile_report(problem, rep.out);
        if (c.write_binaries)
        {
            rep.env_bin = binary_bytes([&](std::ostream& os) { write_environment_binary(os, env); });
            rep.mean_bin = binary_bytes([&](std::ostream& os) {
                write_field_binary(os, rep.out.mean_field(problem), static_cast<std::uint64_t>(N));
            });
        }
        return rep;
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"N", "wall", "U", "alpha", "center_mean", "center_se", "center_n", "center_mean_rb",
                "center_rb_se", "center_ratio", "defect", "defect_se", "defect_rb", "defect_rb_se",
                "far_field", "far_field_se", "geweke_z", "geweke_pass"});
    json rows = json::array();
    bool monotone = true, nonneg = true;
    for (std::size_t i = 0; i < reps.size(); ++i)
    {
        auto const& r = reps[i];
        auto const& p = r.prof;
        csv.row(r.N, r.wall, r.U, p.alpha, p.center_mean.value, p.center_mean.se, p.center_mean.n,
                p.center_mean_rb.value, p.center_mean_rb.se, p.center_ratio, p.defect.value,
                p.defect.se, p.defect_rb.value, p.defect_rb.se, p.far_field.value, p.far_field.se,
                r.out.gate.z, r.out.gate.passed);
        rows.push_back(json{{"N", r.N},
                            {"wall", r.wall},
                            {"U", r.U},
                            {"alpha", p.alpha},
                            {"center", p.center},
                            {"center_mean", estimate_json(p.center_mean)},
                            {"center_mean_rb", estimate_json(p.center_mean_rb)},
                            {"center_ratio", p.center_ratio},
                            {"defect", estimate_json(p.defect)},
                            {"defect_rb", estimate_json(p.defect_rb)},
                            {"far_field", estimate_json(p.far_field)},
                            {"far_field_h", p.far_field_h},
                            {"burn_in", r.out.burn_in},
                            {"sweeps", r.out.sweeps},
                            {"site_updates", r.out.site_updates},
                            {"geweke", json{{"z", r.out.gate.z}, {"passed", r.out.gate.passed}}}});
        nonneg = nonneg && r.out.nonnegative;
        if (i > 0)
            monotone = monotone
                       && exceeds_by_joint_se(p.center_mean_rb, reps[i - 1].prof.center_mean_rb, c.trend_se);
        add(art, "geweke N=" + std::to_string(r.N), r.out.gate.passed, format_double(r.out.gate.z), true);
        if (c.write_binaries)
        {
            art.binaries.emplace_back("environment_N" + std::to_string(r.N) + ".bin", r.env_bin);
            art.binaries.emplace_back("mean_N" + std::to_string(r.N) + ".bin", r.mean_bin);
        }
    }
    bool const defect_down = reps.size() >= 2
                             && reps.back().prof.defect_rb.value < reps.front().prof.defect_rb.value;
    art.report = json{{"rows", rows}, {"monotone_center_mean", monotone}, {"defect_decreasing", defect_down}};
    add(art, "center mean strictly increasing", monotone);
    add(art, "harmonicity defect decreasing", defect_down);
    add(art, "wall nonnegativity", nonneg);
    return art;
}

//---------------------------------------------------------------------------//
struct CoarseSetup
{
    LatticeBox host;
    SetMask VN, W;
    CoarseGrid grid;
    std::vector<std::size_t> selection;  // grid boxes inside V_N
};

CoarseSetup coarse_setup(ExperimentConfig const& c, int N)
{
    CoarseSetup s;
    LatticeBox const hull = c.shape.lattice_hull(N);
    int const L = c.L ? *c.L : coarse_scale(N, c.d);
    // Room for every U_z around the hull, then the padding factor.
    Coord corner = hull.corner(), sides = hull.sides();
    int const reach = c.K * L + 1;
    for (int i = 0; i < c.d; ++i)
    {
        corner[i] -= reach;
        sides[i] += 2 * reach;
    }
    LatticeBox const wbox = padded_box(LatticeBox(corner, sides), c.padding);
    s.host = padded_box(wbox, 1.0);
    s.VN = discrete_blowup(c.shape, N, s.host);
    s.W = SetMask::from_box(s.host, wbox);
    s.grid = build_grid(s.VN, N, c.K, c.L);
    return s;
}

std::size_t coarse_volume(ExperimentConfig const& c, int N)
{
    LatticeBox const hull = c.shape.lattice_hull(N);
    int const L = c.L ? *c.L : coarse_scale(N, c.d);
    Coord corner = hull.corner(), sides = hull.sides();
    int const reach = c.K * L + 1;
    for (int i = 0; i < c.d; ++i)
    {
        corner[i] -= reach;
        sides[i] += 2 * reach;
    }
    return padded_box(padded_box(LatticeBox(corner, sides), c.padding), 1.0).volume();
}

RunArtifacts run_coarse_diagnostics(ExperimentConfig const& c, std::size_t workers)
{
    if (c.N < 3)
        throw ConfigError({"N: coarse-diagnostics needs N >= 3"});
    check_budget(c, coarse_volume(c, c.N), "coarse-diagnostics");
    CoarseSetup s = coarse_setup(c, c.N);
    for (std::size_t i = 0; i < s.grid.size(); ++i)
    {
        LatticeBox const& b = s.grid.B[i];
        bool inside = true;
        for (std::size_t j = 0; j < b.volume() && inside; ++j)
            inside = s.VN.contains(s.host.index(b.coord(j)));
        if (inside)
            s.selection.push_back(i);
    }
    if (s.selection.empty())
        throw CoarseError("coarse-diagnostics: no coarse box lies inside V_N");

    Environment const env = sample_environment(env_for(c, 0), s.host);
    VertexMeasure const nu = nu_coefficients(env, s.grid, s.selection, s.W);
    std::vector<double> nus;
    for (std::size_t i : s.selection)
        nus.push_back(nu.weights[s.host.index(s.grid.points[i])]);
    double const a = good_level(c.delta, *c.g_hat);

    // Enumerable sub-instance: the first few selected boxes.
    std::size_t const n_enum = std::min<std::size_t>(3, s.selection.size());
    std::vector<std::size_t> const sel_enum(s.selection.begin(), s.selection.begin() + n_enum);
    VertexMeasure const nu_e = nu_coefficients(env, s.grid, sel_enum, s.W);
    std::vector<double> nus_e;
    for (std::size_t i : sel_enum)
        nus_e.push_back(nu_e.weights[s.host.index(s.grid.points[i])]);
    double per_box = 1.0;
    for (std::size_t k = 0; k < n_enum; ++k)
        per_box *= static_cast<double>(s.grid.B[sel_enum[k]].volume());
    bool const enumerable = per_box <= static_cast<double>(1u << 20);

    auto const problem = HardWallProblem::create(env, s.W, s.VN, c.N, *c.g_hat);
    CoarseFunctionals const cf_proto(env, s.grid, s.selection, nus);
    CoarseFunctionals const cfe_proto(env, s.grid, sel_enum, nus_e);

    struct Sample
    {
        double z_sup, z_enum_gap, good_fraction;
        std::size_t good, violations;
        bool covering;
        bool nonnegative;
    };
    std::size_t const per = c.samples / c.replicas;
    std::size_t const burn = c.burn_in ? c.burn_in : default_burn_in(s.W);
    std::size_t const thin = std::max<std::size_t>(1, c.sweeps / std::max<std::size_t>(1, c.samples));
    int const L_hat = default_window(s.grid);
    auto chains = parallel_map<std::vector<Sample>>(c.replicas, workers, [&](std::size_t r) {
        std::size_t const m = per + (r == 0 ? c.samples % c.replicas : 0);
        CoarseFunctionals cf = cf_proto;
        CoarseFunctionals cfe = cfe_proto;
        ChainState st = start_chain(problem, stream_seed(c, 1 + r));
        for (std::size_t t = 0; t < burn; ++t)
            gibbs_sweep(problem, st);
        std::vector<Sample> out;
        for (std::size_t t = 0; t < m; ++t)
        {
            for (std::size_t q = 0; q < thin; ++q)
                gibbs_sweep(problem, st);
            Sample smp{};
            smp.nonnegative = true;
            for (std::size_t idx : s.VN.indices())
                smp.nonnegative = smp.nonnegative && st.field.values[idx] >= 0.0;
            cf.load(st.field);
            smp.z_sup = cf.z_sup();
            if (enumerable)
            {
                cfe.load(st.field);
                double const zs = cfe.z_sup();
                smp.z_enum_gap = std::abs(cfe.z_sup_enumerated() - zs) / (1.0 + std::abs(zs));
            }
            Classification const cl = classify_boxes(cf, a, c.N);
            smp.good = cl.n_good;
            smp.good_fraction = static_cast<double>(cl.n_good) / static_cast<double>(cf.size());
            for (std::size_t k = 0; k < cf.size(); ++k)
            {
                if (!cl.good[k])
                    continue;
                auto const& xi = cf.xi(k);
                if (*std::max_element(xi.begin(), xi.end()) < cl.level)
                    ++smp.violations;
            }
            std::vector<std::uint8_t> flags(s.grid.size(), 0);
            for (std::size_t k = 0; k < cf.size(); ++k)
                flags[s.selection[k]] = cl.good[k];
            smp.covering = covering_check(s.grid, flags, c.rho, L_hat, s.VN).pass;
            out.push_back(smp);
        }
        return out;
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"replica", "sample", "z_sup", "z_enum_gap", "good", "good_fraction", "violations",
                "covering_pass"});
    RunningStats zs, gf;
    double enum_gap = 0.0;
    std::size_t violations = 0, n_cover = 0, total = 0;
    bool nonneg = true;
    for (std::size_t r = 0; r < chains.size(); ++r)
        for (std::size_t t = 0; t < chains[r].size(); ++t)
        {
            auto const& x = chains[r][t];
            csv.row(r, t, x.z_sup, x.z_enum_gap, x.good, x.good_fraction, x.violations, x.covering);
            zs.add(x.z_sup);
            gf.add(x.good_fraction);
            enum_gap = std::max(enum_gap, x.z_enum_gap);
            violations += x.violations;
            n_cover += x.covering;
            nonneg = nonneg && x.nonnegative;
            ++total;
        }
    double const nu_mass = nu.total;
    double const nu_mass_e = nu_e.total;
    art.report = json{{"L", s.grid.L},
                      {"grid_points", s.grid.size()},
                      {"selected_boxes", s.selection.size()},
                      {"enumerated_boxes", n_enum},
                      {"nu_mass", nu_mass},
                      {"nu", nus},
                      {"level", std::sqrt(a * std::log(static_cast<double>(c.N)))},
                      {"a_delta", a},
                      {"window", L_hat},
                      {"samples", total},
                      {"z_sup", estimate_json(zs.estimate())},
                      {"good_fraction", estimate_json(gf.estimate())},
                      {"covering_pass_fraction", static_cast<double>(n_cover) / static_cast<double>(total)},
                      {"max_enum_gap", enum_gap},
                      {"good_box_violations", violations}};
    add(art, "nu mass 1e-9", std::abs(nu_mass - 1.0) <= 1e-9 && std::abs(nu_mass_e - 1.0) <= 1e-9,
        format_double(nu_mass - 1.0));
    if (enumerable)
        add(art, "sup over selectors equals per-box max", enum_gap <= 1e-12, format_double(enum_gap));
    add(art, "good boxes reach the level", violations == 0, std::to_string(violations));
    add(art, "conditioned samples nonnegative", nonneg);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_solidification(ExperimentConfig const& c, std::size_t workers)
{
    std::vector<int> const ladder = ladder_or(c, {8, 16});
    for (int N : ladder)
    {
        if (N < 3)
            throw ConfigError({"ladder: solidification needs N >= 3"});
        check_budget(c, coarse_volume(c, N), "solidification");
    }
    std::size_t const tasks = ladder.size() * c.replicas;
    auto res = parallel_map<SolidificationResult>(tasks, workers, [&](std::size_t t) {
        std::size_t const li = t / c.replicas, r = t % c.replicas;
        CoarseSetup const s = coarse_setup(c, ladder[li]);
        Environment const env = sample_environment(env_for(c, r), s.host);
        SetMask const probe = epsilon_bulk(c.shape, c.eps, ladder[li], s.host);
        SolidificationResult out = solidification_probe(env, s.grid, s.grid.all(), probe, s.W);
        out.escape = Field();
        return out;
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"N", "replica", "sup_escape", "cap_S", "cap_probe", "ratio"});
    json rows = json::array();
    bool escape_down = true, ratio_up = true;
    for (std::size_t t = 0; t < tasks; ++t)
    {
        std::size_t const li = t / c.replicas, r = t % c.replicas;
        auto const& x = res[t];
        csv.row(ladder[li], r, x.sup_escape, x.cap_S, x.cap_probe, x.ratio);
        rows.push_back(json{{"N", ladder[li]}, {"replica", r}, {"sup_escape", x.sup_escape},
                            {"cap_S", x.cap_S}, {"cap_probe", x.cap_probe}, {"ratio", x.ratio}});
        if (li > 0)
        {
            auto const& prev = res[t - c.replicas];
            escape_down = escape_down && x.sup_escape < prev.sup_escape;
            ratio_up = ratio_up && x.ratio > prev.ratio;
        }
    }
    art.report = json{{"rows", rows}, {"escape_decreasing", escape_down}, {"ratio_increasing", ratio_up}};
    add(art, "sup escape strictly decreasing", escape_down);
    add(art, "capacity ratio strictly increasing", ratio_up);
    return art;
}

//---------------------------------------------------------------------------//
RunArtifacts run_convergence_suite(ExperimentConfig const& c, std::size_t workers)
{
    std::vector<int> const ladder = ladder_or(c, {8, 16});
    double const radius = c.shape.kind == Shape::Kind::ball ? c.shape.radius : c.shape.half_widths[0];
    for (int N : ladder)
    {
        int const side = 2 * (static_cast<int>(std::ceil(c.padding * N * radius)) + 1) + 1;
        check_budget(c, static_cast<std::size_t>(std::pow(side, c.d)), "convergence-suite");
    }
    std::vector<EnvironmentSpec> envs = {EnvironmentSpec::constant(c.env.law == EnvironmentSpec::Law::constant
                                                                       ? c.env.value
                                                                       : 1.0)};
    if (c.env.law != EnvironmentSpec::Law::constant)
    {
        envs.push_back(env_for(c, 0));
        envs.push_back(env_for(c, 1));
    }
    double const padding = std::max(c.padding, 1.5);
    auto rows = parallel_map<ConvergenceRow>(ladder.size(), workers, [&](std::size_t i) {
        return potential_convergence(envs, radius, c.d, {ladder[i]}, padding).front();
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"N", "cross_discrepancy", "comparator_gap"});
    json jr = json::array();
    bool gap_down = true, cross_down = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        csv.row(rows[i].N, rows[i].cross_discrepancy, rows[i].comparator_gap);
        jr.push_back(json{{"N", rows[i].N},
                          {"cross_discrepancy", rows[i].cross_discrepancy},
                          {"comparator_gap", rows[i].comparator_gap}});
        if (i > 0)
        {
            gap_down = gap_down && rows[i].comparator_gap < rows[i - 1].comparator_gap;
            cross_down = cross_down && rows[i].cross_discrepancy < rows[i - 1].cross_discrepancy;
        }
    }
    art.report = json{{"rows", jr}, {"radius", radius}, {"padding", padding},
                      {"comparator_gap_decreasing", gap_down}, {"cross_decreasing", cross_down}};
    add(art, "comparator gap decreasing", gap_down);
    if (envs.size() > 1)
        add(art, "cross-environment discrepancy decreasing", cross_down, {}, true);
    return art;
}

}  // namespace

//---------------------------------------------------------------------------//
RunArtifacts run_experiment(ExperimentConfig const& config, std::size_t workers)
{
    ExperimentConfig c = config;
    bool const needs_g = c.kind == "hardwall-prob" || c.kind == "repulsion-profile"
                         || c.kind == "coarse-diagnostics";
    if (needs_g && !c.g_hat)
        c.g_hat = default_g_hat(c.env, c.d);
    RunArtifacts art;
    if (c.kind == "green-oracle")
        art = run_green_oracle(c, workers);
    else if (c.kind == "gff-covariance")
        art = run_gff_covariance(c, workers);
    else if (c.kind == "capacity-scaling")
        art = run_capacity_scaling(c, workers);
    else if (c.kind == "gbar")
        art = run_gbar(c, workers);
    else if (c.kind == "hardwall-prob")
        art = run_hardwall_prob(c, workers);
    else if (c.kind == "repulsion-profile")
        art = run_repulsion_profile(c, workers);
    else if (c.kind == "coarse-diagnostics")
        art = run_coarse_diagnostics(c, workers);
    else if (c.kind == "solidification")
        art = run_solidification(c, workers);
    else if (c.kind == "convergence-suite")
        art = run_convergence_suite(c, workers);
    else
        throw ConfigError({"kind: unknown experiment kind '" + c.kind + "'"});
    art.resolved = c;
    return art;
}

RunArtifacts padding_study(ExperimentConfig const& config, std::vector<double> const& factors,
                           std::size_t workers)
{
    std::vector<std::string> errs;
    if (factors.empty())
        errs.push_back("padding_ladder: empty");
    for (std::size_t i = 0; i < factors.size(); ++i)
    {
        if (!(factors[i] >= 2.0))
            errs.push_back("padding_ladder: factors must be >= 2");
        if (i > 0 && !(factors[i] > factors[i - 1]))
            errs.push_back("padding_ladder: must be strictly increasing");
    }
    if (!errs.empty())
        throw ConfigError(errs);
    ExperimentConfig c = config;
    c.kind = "padding-study";
    c.padding_ladder = factors;
    if (!c.g_hat)
        c.g_hat = default_g_hat(c.env, c.d);
    for (double f : factors)
        check_budget(c, wall_geometry(c.shape, c.N, f).host.volume(), "padding-study");

    struct Row
    {
        double capacity, bound, green;
        int R;
        Estimate mean, mean_rb;
    };
    auto rows = parallel_map<Row>(factors.size(), workers, [&](std::size_t i) {
        double const f = factors[i];
        ScalingStudy st;
        st.env = env_for(c, 0);
        st.shape = c.shape;
        st.ladder = {c.N};
        st.padding = f;
        st.seed = stream_seed(c, 1);
        ScalingRow const cap = capacity_scaling(st).rows.front();
        int const R = std::max(2, static_cast<int>(std::lround(f * c.N / 2.0)));
        EnvironmentSpec gs = env_for(c, 0);
        double const green = ball_green_diagonal(gs, c.d, R);

        WallGeometry const geo = wall_geometry(c.shape, c.N, f);
        Environment const env = sample_environment(env_for(c, 0), geo.host);
        SetMask const wall = discrete_blowup(c.shape, c.N, geo.host);
        auto const problem = HardWallProblem::create(env, SetMask::from_box(geo.host, geo.ubox), wall,
                                                     c.N, *c.g_hat);
        ChainOptions co;
        co.burn_in = c.burn_in;
        co.n_sweeps = c.sweeps;
        co.n_batches = c.batches;
        co.seed = stream_seed(c, 2 + i);
        auto const prof = repulsion_profile_report(problem, run_chain(problem, co));
        return Row{cap.value, cap.bound, green, R, prof.center_mean, prof.center_mean_rb};
    });

    RunArtifacts art;
    Csv csv{art};
    csv.header({"padding", "capacity", "capacity_bound", "R", "green", "center_mean", "center_se",
                "center_n", "center_mean_rb", "center_rb_se", "capacity_gap", "green_gap", "mean_gap",
                "mean_gap_se"});
    json jr = json::array();
    std::vector<double> cap_gaps, green_gaps;
    double last_gap = 0.0, last_gap_se = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        auto const& r = rows[i];
        double cg = 0.0, gg = 0.0, mg = 0.0, mse = 0.0;
        if (i > 0)
        {
            cg = r.capacity - rows[i - 1].capacity;
            gg = r.green - rows[i - 1].green;
            mg = r.mean_rb.value - rows[i - 1].mean_rb.value;
            mse = std::hypot(r.mean_rb.se, rows[i - 1].mean_rb.se);
            cap_gaps.push_back(std::abs(cg));
            green_gaps.push_back(gg);
            last_gap = std::abs(mg);
            last_gap_se = mse;
        }
        csv.row(factors[i], r.capacity, r.bound, r.R, r.green, r.mean.value, r.mean.se, r.mean.n,
                r.mean_rb.value, r.mean_rb.se, cg, gg, mg, mse);
        jr.push_back(json{{"padding", factors[i]},
                          {"capacity", r.capacity},
                          {"capacity_bound", r.bound},
                          {"R", r.R},
                          {"green", r.green},
                          {"center_mean", estimate_json(r.mean)},
                          {"center_mean_rb", estimate_json(r.mean_rb)}});
    }
    bool cap_shrink = true, green_up = true;
    for (std::size_t i = 1; i < cap_gaps.size(); ++i)
        cap_shrink = cap_shrink && cap_gaps[i] < cap_gaps[i - 1];
    for (double g : green_gaps)
        green_up = green_up && g > 0.0;
    bool const nonconverged = rows.size() >= 2 && last_gap > 3.0 * last_gap_se;
    art.report = json{{"rows", jr},
                      {"capacity_gaps_shrink", cap_shrink},
                      {"green_increasing", green_up},
                      {"last_mean_gap", last_gap},
                      {"last_mean_gap_se", last_gap_se},
                      {"non_convergence", nonconverged}};
    add(art, "capacity gaps shrink", cap_shrink, {}, true);
    add(art, "g(0,0) increasing in padding", green_up, {}, true);
    add(art, "center mean converged", !nonconverged,
        format_double(last_gap) + " vs 3 SE " + format_double(3.0 * last_gap_se), true);
    art.resolved = c;
    return art;
}

//---------------------------------------------------------------------------//
json report_json(RunArtifacts const& art, bool strict)
{
    json a = json::array();
    for (auto const& x : art.assertions)
        a.push_back(json{{"name", x.name}, {"passed", x.passed}, {"gate", x.gate}, {"detail", x.detail}});
    return json{{"version", kVersion},
                {"config", config_to_json(art.resolved)},
                {"strict", strict},
                {"passed", art.passed(strict)},
                {"assertions", a},
                {"results", art.report}};
}

std::string results_csv(RunArtifacts const& art)
{
    std::string s;
    auto line = [&](std::vector<std::string> const& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + v[i];
        s += '\n';
    };
    line(art.csv_header);
    for (auto const& r : art.csv_rows)
        line(r);
    return s;
}

void write_artifacts(RunArtifacts const& art, std::string const& dir, bool strict)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](std::string const& name, std::string const& bytes) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        os << bytes;
    };
    put("results.csv", results_csv(art));
    put("report.json", report_json(art, strict).dump(2) + "\n");
    for (auto const& [name, bytes] : art.binaries)
        put(name, bytes);
}

}  // namespace hwgff
