// Command-line front end: parse flags, run one sweep, write its files.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "schelling/report.hpp"

int main(int argc, char** argv) {
    schelling::Config cfg;
    std::string out = cfg.out_dir.string();

    CLI::App app{"Schelling segregation sweeps on dense random networks"};
    app.set_config("--config", "", "flat key=value file mirroring the flags; flags win");
    app.add_option("--sweep", cfg.sweep, "symmetric, asymmetric, groupsize, minority-large, minority-small, or a grid file")
        ->required();
    app.add_option("--reps", cfg.reps, "repetitions per grid cell")->capture_default_str();
    app.add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--k", cfg.k_singular, "singular values fed to the elbow")->capture_default_str();
    app.add_option("--jobs", cfg.parallelism, "worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("--plots", cfg.emit_plots, "also write SVG plots");
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "no progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.out_dir = out;

    auto progress = [&](std::size_t done, std::size_t total) {
        if (!quiet && (done == total || done % cfg.reps == 0)) {
            std::fprintf(stderr, "\r%zu/%zu runs", done, total);
            if (done == total) {
                std::fputc('\n', stderr);
            }
        }
    };

    try {
        const auto outputs = schelling::execute(cfg, progress);
        std::cout << outputs.raw.string() << '\n' << outputs.aggregate.string() << '\n';
        for (const auto& p : outputs.plots) {
            std::cout << p.string() << '\n';
        }
    } catch (const schelling::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const schelling::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
