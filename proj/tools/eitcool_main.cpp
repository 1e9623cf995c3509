// eitcool_main.cpp — Command-line scenario runner.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "eitcool/errors.hpp"
#include "eitcool/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"eitcool — EIT and double-bright-EIT laser-cooling simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    eitcool::cli::RunOptions options;

    CLI::App* run = app.add_subcommand("run", "execute a scenario file");
    run->add_option("scenario", scenario_path, "scenario configuration file")->required();
    run->add_option("--out", options.out_dir, "output directory (default: current)");
    run->add_option("--workers", options.workers,
                    "worker threads for sweeps (default: EITCOOL_WORKERS or 1)");
    run->add_option("--fock", options.fock_dim, "Fock-space truncation override");
    run->add_option("--tolerance", options.tolerance, "integrator tolerance override");
    run->add_flag("--gnuplot-stub", options.gnuplot_stub,
                  "emit a companion gnuplot script per CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        return app.exit(error);
    }

    try {
        const auto scenario = eitcool::cli::load_scenario(scenario_path);
        const auto summary = eitcool::cli::run(scenario, options);
        std::cout << "experiment: " << summary.experiment << "\n";
        for (const auto& file : summary.output_files) std::cout << "wrote: " << file << "\n";
        for (const auto& [key, value] : summary.metrics) {
            std::printf("%s: %.9g\n", key.c_str(), value);
        }
        for (const auto& note : summary.notes) std::cout << "note: " << note << "\n";
        std::printf("wall_s: %.3f\n", summary.wall_seconds);
        return 0;
    } catch (const eitcool::ConfigError& error) {
        std::cerr << "config error";
        if (error.line() > 0) std::cerr << " (line " << error.line() << ")";
        if (!error.field().empty()) std::cerr << " [" << error.field() << "]";
        std::cerr << ": " << error.what() << "\n";
        return 2;
    } catch (const eitcool::PhysicsError& error) {
        std::cerr << "physics error: " << error.what() << "\n";
        return 3;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
}
