#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "schelling/experiments.hpp"
#include "schelling/plots.hpp"

namespace schelling {

/// Bad flag values, unknown sweep names. Maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable inputs or unwritable outputs. Maps to exit code 1.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    // Built-in sweep name or path to a custom grid file.
    std::string sweep;
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "results";
    std::size_t k_singular = 120;
    // 0 means one worker per logical core.
    std::size_t parallelism = 0;
    bool emit_plots = false;
};

struct Outputs {
    std::filesystem::path raw;
    std::filesystem::path aggregate;
    std::vector<std::filesystem::path> plots;
    SweepResult result;
};

inline SweepSpec resolve_sweep(const Config& cfg) {
    if (cfg.reps == 0) {
        throw UsageError("--reps must be at least 1");
    }
    if (cfg.k_singular < 3) {
        throw UsageError("--k must be at least 3");
    }
    SweepSpec spec;
    const bool builtin = std::find(builtin_sweep_names.begin(), builtin_sweep_names.end(), cfg.sweep) !=
                         builtin_sweep_names.end();
    if (builtin) {
        spec = builtin_sweep(cfg.sweep);
    } else if (!cfg.sweep.empty() && std::filesystem::is_regular_file(cfg.sweep)) {
        try {
            spec = load_custom_grid(std::filesystem::path(cfg.sweep));
        } catch (const std::invalid_argument& e) {
            throw UsageError(cfg.sweep + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw IoError(e.what());
        }
    } else {
        throw UsageError("unknown sweep '" + cfg.sweep + "'; built-in sweeps: " + detail::builtin_list() +
                         " (or a path to a grid file)");
    }
    spec.reps = cfg.reps;
    spec.base_seed = cfg.seed;
    spec.k_singular = cfg.k_singular;
    try {
        for (const auto& c : spec.grid) {
            spec.params_for(c).validate();
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

/// Plots for an existing pair of output files.
inline std::vector<std::filesystem::path> emit_plots_from_files(const std::filesystem::path& aggregate_csv,
                                                                const std::filesystem::path& raw_archive,
                                                                const std::filesystem::path& out_dir,
                                                                const std::string& name) {
    std::ifstream agg_in(aggregate_csv);
    std::ifstream raw_in(raw_archive);
    if (!agg_in || !raw_in) {
        throw IoError("cannot read " + aggregate_csv.string() + " or " + raw_archive.string());
    }
    try {
        const auto rows = read_aggregate_csv(agg_in);
        const auto raw = read_raw_archive(raw_in);
        return plots::emit_plots(rows, raw, out_dir, name);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

/// Runs the configured sweep and writes `<name>_raw.txt`, `<name>_agg.csv`
/// and, when requested, the plots into the output directory.
inline Outputs execute(const Config& cfg, const ProgressFn& progress = {}) {
    const SweepSpec spec = resolve_sweep(cfg);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.out_dir)) {
        throw IoError("cannot create output directory " + cfg.out_dir.string());
    }

    Outputs out;
    out.result = run_sweep(spec, cfg.parallelism, progress);
    out.raw = cfg.out_dir / (spec.name + "_raw.txt");
    out.aggregate = cfg.out_dir / (spec.name + "_agg.csv");
    {
        std::ofstream raw(out.raw, std::ios::binary);
        write_raw_archive(raw, out.result.raw);
        std::ofstream agg(out.aggregate, std::ios::binary);
        write_aggregate_csv(agg, out.result.rows);
        if (!raw || !agg) {
            throw IoError("cannot write results into " + cfg.out_dir.string());
        }
    }
    if (cfg.emit_plots) {
        out.plots = emit_plots_from_files(out.aggregate, out.raw, cfg.out_dir, spec.name);
    }
    return out;
}

}  // namespace schelling
