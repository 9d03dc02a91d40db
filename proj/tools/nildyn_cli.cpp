#include "nildyn/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = nildyn::cli;

int main(int argc, char** argv) {
    CLI::App app{"Experiments on torus flows, Heisenberg nilflows and their suspensions"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    cli::RunOptions opt;
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--out", opt.out, "report path; artifacts are written next to it");
    app.add_option("--format", opt.format, "report format")->check(CLI::IsMember({"json", "csv"}));

    std::vector<CLI::App*> subs;
    for (const auto& spec : cli::operation_specs()) subs.push_back(app.add_subcommand(spec.name, spec.summary));
    auto* validate = app.add_subcommand("validate", "list schema and semantic problems without running");
    auto* run = app.add_subcommand("run", "run the operation named in the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(cli::ExitCode::Schema);
    }
    if (*seed_opt) opt.seed = seed;

    if (validate->parsed()) {
        nildyn::cli::json report;
        try {
            report = cli::validate_report(cli::load_config(config_path));
        } catch (const cli::SchemaError& e) {
            nildyn::cli::json d = nildyn::cli::json::array();
            for (const auto& x : e.diagnostics()) d.push_back(x.to_json());
            report = {{"valid", false}, {"diagnostics", d}};
        }
        std::cout << cli::dump17(report) << '\n';
        return 0;
    }

    if (!run->parsed())
        for (auto* s : subs)
            if (s->parsed()) opt.operation = s->get_name();

    cli::RunOutcome outcome;
    try {
        outcome = cli::run(cli::load_config(config_path), opt);
    } catch (const cli::SchemaError& e) {
        std::cerr << e.what() << '\n';
        return static_cast<int>(cli::ExitCode::Schema);
    }
    try {
        return cli::emit(outcome, opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return static_cast<int>(cli::ExitCode::Schema);
    }
}
