#include "srbf/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Sparse RBF network solver for nonlinear PDEs"};
    app.require_subcommand(1);

    srbf::CommandOptions opts;
    std::uint64_t seed = 0;
    std::string out;
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "Run configuration (INI)")->required();
        sub->add_option("--out", out, "Output directory (overrides run.out)");
        sub->add_option("--seed", seed, "Random seed (overrides run.seed)");
        sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "Solve one configured problem");
    add_run_flags(solve);
    auto* march = app.add_subcommand("march", "Implicit Euler march for Burgers");
    add_run_flags(march);
    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over alpha, lambda and grid size");
    add_run_flags(sweep);
    auto* check = app.add_subcommand("check", "Run the finite-difference oracle suite");
    std::string inject = "none";
    check->add_option("--inject", inject, "Fault injection for the self-test")
        ->check(CLI::IsMember({"none", "hess_sign"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : srbf::kExitUsage;
    }

    for (auto* sub : {solve, march, sweep}) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) opts.seed = seed;
        if (sub->count("--out")) opts.out = out;
    }
    if (solve->parsed()) return srbf::cmd_solve(opts);
    if (march->parsed()) return srbf::cmd_march(opts);
    if (sweep->parsed()) return srbf::cmd_sweep(opts);
    return srbf::cmd_check(inject == "hess_sign" ? srbf::Injection::HessianSign
                                                 : srbf::Injection::None,
                           std::cout);
}
