// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwgff/experiments.hpp"

namespace {

enum Exit
{
    exit_pass = 0,
    exit_assertion = 1,
    exit_config = 2,
    exit_resource = 3
};

struct Common
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::optional<std::string> out;
    bool strict = false;
};

hwgff::ExperimentConfig load(Common const& o)
{
    std::ifstream is(o.config);
    if (!is)
        throw hwgff::ConfigError({"--config: cannot open '" + o.config + "'"});
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(is);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw hwgff::ConfigError({std::string("--config: ") + e.what()});
    }
    auto c = hwgff::parse_config(j);
    if (o.seed)
        c.seed = *o.seed;
    if (o.out)
        c.output = *o.out;
    return c;
}

void summarize(hwgff::RunArtifacts const& art, bool strict)
{
    for (auto const& a : art.assertions)
        std::cout << (a.passed ? "PASS " : (a.gate && !strict ? "WARN " : "FAIL ")) << a.name
                  << (a.detail.empty() ? "" : " (" + a.detail + ")") << "\n";
}

template <class F>
int guarded(F&& f)
{
    try
    {
        return f();
    }
    catch (hwgff::ConfigError const& e)
    {
        std::cerr << e.what() << "\n";
        return exit_config;
    }
    catch (hwgff::ResourceError const& e)
    {
        std::cerr << "resource abort: " << e.what() << "\n";
        return exit_resource;
    }
    catch (std::bad_alloc const&)
    {
        std::cerr << "resource abort: out of memory\n";
        return exit_resource;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
}

void add_common(CLI::App* sub, Common& o, bool run_flags)
{
    sub->add_option("--config", o.config, "JSON experiment configuration")->required();
    if (!run_flags)
        return;
    sub->add_option("--seed", o.seed, "master seed (overrides the config)");
    sub->add_option("--workers", o.workers, "replica worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_flag("--strict", o.strict, "treat empirical gates as fatal assertions");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gaussian free field with random conductances: hard-wall experiments"};
    app.set_version_flag("--version", hwgff::kVersion);
    app.require_subcommand(1);

    Common run_opts, pad_opts, val_opts;
    std::vector<double> factors;
    auto* run = app.add_subcommand("run", "run one experiment and write results.csv and report.json");
    add_common(run, run_opts, true);
    auto* pad = app.add_subcommand("padding-study", "observables across killing-box padding factors");
    add_common(pad, pad_opts, true);
    pad->add_option("--padding", factors, "padding factors (default: the config's padding_ladder)")
        ->delimiter(',');
    app.add_subcommand("list-experiments", "print the experiment kinds");
    auto* val = app.add_subcommand("validate-config", "validate a configuration and echo it with defaults");
    add_common(val, val_opts, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? exit_pass : exit_config;
    }

    if (app.got_subcommand("list-experiments"))
    {
        for (auto const& k : hwgff::experiment_kinds())
            std::cout << k << "\n";
        return exit_pass;
    }
    if (app.got_subcommand("validate-config"))
    {
        return guarded([&] {
            auto const c = load(val_opts);
            std::cout << hwgff::config_to_json(c).dump(2) << "\n";
            return static_cast<int>(exit_pass);
        });
    }
    if (app.got_subcommand("run"))
    {
        return guarded([&] {
            auto const c = load(run_opts);
            auto const art = hwgff::run_experiment(c, run_opts.workers);
            hwgff::write_artifacts(art, c.output, run_opts.strict);
            summarize(art, run_opts.strict);
            return static_cast<int>(art.passed(run_opts.strict) ? exit_pass : exit_assertion);
        });
    }
    return guarded([&] {
        auto const c = load(pad_opts);
        auto const art = hwgff::padding_study(c, factors.empty() ? c.padding_ladder : factors, pad_opts.workers);
        hwgff::write_artifacts(art, c.output, pad_opts.strict);
        summarize(art, pad_opts.strict);
        return static_cast<int>(art.passed(pad_opts.strict) ? exit_pass : exit_assertion);
    });
}
