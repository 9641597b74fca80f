#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "olrwa/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Online linear regression benchmarks (OLR-WA and baselines)"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset from a JSON spec");
    generate->add_option("spec", spec_path, "Dataset spec (JSON)")->required();
    generate->add_option("out", out_path, "Output CSV path")->required();

    std::string run_config;
    auto* run = app.add_subcommand("run", "Cross-validated benchmark driven by a config");
    run->add_option("config", run_config, "Run config (JSON)")->required();

    std::string curve_config;
    auto* curve = app.add_subcommand("curve", "Learning curves driven by a config");
    curve->add_option("config", curve_config, "Run config (JSON)")->required();

    std::vector<std::string> compare_configs;
    std::string merged;
    auto* compare = app.add_subcommand("compare", "Run several configs and merge their tables");
    compare->add_option("configs", compare_configs, "Run configs (JSON)")->required();
    compare->add_option("-o,--output", merged, "Also write the merged table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : olrwa::cli::ConfigError;
    }

    if (*generate) return olrwa::cli::cmd_generate(spec_path, out_path, std::cout, std::cerr);
    if (*run) return olrwa::cli::cmd_run(run_config, std::cout, std::cerr);
    if (*curve) return olrwa::cli::cmd_curve(curve_config, std::cout, std::cerr);
    std::vector<std::filesystem::path> paths(compare_configs.begin(), compare_configs.end());
    std::optional<std::filesystem::path> merged_path;
    if (!merged.empty()) merged_path = merged;
    return olrwa::cli::cmd_compare(paths, merged_path, std::cout, std::cerr);
}
