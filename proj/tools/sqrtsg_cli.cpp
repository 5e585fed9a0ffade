// sqrtsg: batch runner for square-root semigroup scenarios.
//
//   sqrtsg run <config> [--out DIR] [--jobs N] [--seed S]
//   sqrtsg list-catalog [--json]

#include <iostream>

#include <CLI11.hpp>

#include "sqrtsg/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Square-root semigroups of accretive operators: solver, rate functionals and certification"};
    app.require_subcommand(1);

    sqrtsg::RunOptions opts;
    std::string config;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "Run every scenario of a config file");
    run->add_option("config", config, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    run->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");

    bool as_json = false;
    auto* cat = app.add_subcommand("list-catalog", "List operators, moduli and the counterfunction grammar");
    cat->add_flag("--json", as_json, "Emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    if (*cat) {
        sqrtsg::list_catalog(std::cout, as_json);
        return 0;
    }
    if (*seed_opt) opts.seed = seed;
    return sqrtsg::run(config, opts, std::cout, std::cerr);
}
