// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hwgff/environment.hpp"
#include "hwgff/lattice.hpp"
#include "hwgff/stats.hpp"

namespace hwgff {

extern char const* const kVersion;

/// Configuration rejected; `errors` lists every violated field.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> errors);
    std::vector<std::string> const& errors() const { return errors_; }

  private:
    std::vector<std::string> errors_;
};

/// Requested problem exceeds the configured resource budget.
class ResourceError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
struct ExperimentConfig
{
    std::string kind = "green-oracle";
    int d = 3;
    Shape shape = Shape::cube(3, 1.0);
    int N = 4;
    std::vector<int> ladder;
    EnvironmentSpec env = EnvironmentSpec::constant(1.0);

    // Hard-wall and coarse-graining parameters.
    std::optional<double> g_hat;  // default: g_{B(0,8)}(0,0) / lambda
    double delta = 0.25;
    double eps = 0.5;
    int K = 2;
    double rho = 0.5;
    double beta = 0.0;
    std::optional<int> L;

    // Monte Carlo parameters.
    std::size_t burn_in = 0;
    std::size_t sweeps = 4000;
    std::size_t batches = 20;
    std::size_t replicas = 1;
    std::size_t samples = 10000;

    double padding = 4.0;
    std::vector<double> padding_ladder = {2.0, 4.0, 8.0};
    double k_se = 4.0;
    double trend_se = 2.0;
    std::size_t max_host_volume = std::size_t{1} << 22;

    std::string output = "out";
    bool write_binaries = false;
    std::uint64_t seed = 1;
};

std::vector<std::string> const& experiment_kinds();

/// Parse and validate; throws ConfigError listing every problem.
ExperimentConfig parse_config(nlohmann::json const& j);
nlohmann::json config_to_json(ExperimentConfig const& c);

nlohmann::json estimate_json(Estimate const& e);

struct Assertion
{
    std::string name;
    bool passed = true;
    bool gate = false;  // empirical gate, fatal only in strict mode
    std::string detail;
};

struct RunArtifacts
{
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    nlohmann::json report;  // experiment-specific body
    std::vector<Assertion> assertions;
    ExperimentConfig resolved;
    std::vector<std::pair<std::string, std::string>> binaries;  // file name, bytes

    bool passed(bool strict) const;
};

/// Run one experiment; every replica is a pure function of
/// (config, replica index), aggregated in index order.
RunArtifacts run_experiment(ExperimentConfig const& config, std::size_t workers = 1);

/// Key observables across killing-box padding factors.
RunArtifacts padding_study(ExperimentConfig const& config, std::vector<double> const& factors,
                           std::size_t workers = 1);

/// Write results.csv and report.json into `dir` (created if missing).
void write_artifacts(RunArtifacts const& art, std::string const& dir, bool strict);
/// report.json body: version, resolved config, assertions, results.
nlohmann::json report_json(RunArtifacts const& art, bool strict);
std::string results_csv(RunArtifacts const& art);

/// Default on-site variance scale g_{B(0,8)}(0,0) / lambda.
double default_g_hat(EnvironmentSpec const& spec, int d);

std::string format_double(double v);

//---------------------------------------------------------------------------//
/// Map i -> f(i) on a bounded worker pool; results in index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, F&& f)
{
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                slots[i].emplace(f(i));
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t const w = std::max<std::size_t>(1, std::min(workers, n));
    if (w == 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < w; ++t)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    for (auto const& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

}  // namespace hwgff
