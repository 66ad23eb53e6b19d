#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "schelling/run.hpp"

namespace schelling {

/// One parameter combination of a sweep.
struct Cell {
    Tolerance t1;
    Tolerance t2;
    double s = 0.5;
};

struct SweepSpec {
    std::string name;
    std::vector<Cell> grid;
    std::size_t reps = 100;
    std::uint64_t base_seed = 0;
    ModelParams params_base;
    std::size_t k_singular = 120;

    [[nodiscard]] ModelParams params_for(const Cell& c) const {
        ModelParams p = params_base;
        p.t1 = c.t1;
        p.t2 = c.t2;
        p.s = c.s;
        return p;
    }

    [[nodiscard]] std::uint64_t seed_for(std::size_t cell, std::size_t rep) const {
        return base_seed + cell * reps + rep;
    }
};

/// Per-run line of the raw archive.
struct RunRecord {
    std::string sweep;
    double t1 = 0.0;
    double t2 = 0.0;
    double s = 0.0;
    std::uint64_t seed = 0;
    bool stabilised = false;
    std::optional<std::size_t> stabilisation_step;
    double similarity_overall = 0.0;
    double similarity_g1 = 0.0;
    double similarity_g2 = 0.0;
    std::size_t d_hat = 0;
};

/// Tukey five-number summary; quartiles are medians of the lower and upper
/// halves, each half including the median when the count is odd.
struct FiveNumber {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

struct AggregateRow {
    double t1 = 0.0;
    double t2 = 0.0;
    double s = 0.0;
    double similarity = 0.0;
    double similarity_g1 = 0.0;
    double similarity_g2 = 0.0;
    // Absent when no run stabilised.
    std::optional<double> stabilisation_mean;
    std::optional<FiveNumber> stabilisation;
    double d_hat_mean = 0.0;
    std::size_t stabilised_runs = 0;
    std::size_t reps = 0;
};

struct SweepResult {
    std::vector<AggregateRow> rows;
    std::vector<RunRecord> raw;
};

inline constexpr std::array<std::string_view, 5> builtin_sweep_names = {
    "symmetric", "asymmetric", "groupsize", "minority-large", "minority-small"};

namespace detail {

inline std::string builtin_list() {
    std::string out;
    for (auto n : builtin_sweep_names) {
        out += out.empty() ? "" : ", ";
        out += n;
    }
    return out;
}

inline Cell cell(int t1, int t2, int s) {
    return {Tolerance::from_hundredths(t1), Tolerance::from_hundredths(t2), s / 100.0};
}

inline double median_sorted(std::span<const double> v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline FiveNumber five_number(std::vector<double> v) {
    if (v.empty()) {
        throw std::invalid_argument("five_number: empty sample");
    }
    std::sort(v.begin(), v.end());
    const std::span<const double> all(v);
    const std::size_t half = (v.size() + 1) / 2;
    return {v.front(), detail::median_sorted(all.first(half)), detail::median_sorted(all),
            detail::median_sorted(all.last(half)), v.back()};
}

/// Grids of the built-in experiments; `custom` grids come from files.
inline SweepSpec builtin_sweep(std::string_view name) {
    SweepSpec spec;
    spec.name = std::string(name);
    auto& g = spec.grid;
    if (name == "symmetric") {
        for (int t = 5; t <= 100; t += 5) {
            g.push_back(detail::cell(t, t, 50));
        }
    } else if (name == "asymmetric") {
        for (int t1 : {50, 90}) {
            for (int t2 = 5; t2 <= 100; t2 += 5) {
                g.push_back(detail::cell(t1, t2, 50));
            }
        }
    } else if (name == "groupsize") {
        for (int s = 5; s <= 50; s += 5) {
            for (int t : {25, 50, 85, 95}) {
                g.push_back(detail::cell(t, t, s));
            }
        }
    } else if (name == "minority-large") {
        for (int t1 : {50, 90}) {
            for (int t2 : {50, 90}) {
                g.push_back(detail::cell(t1, t2, 15));
            }
        }
    } else if (name == "minority-small") {
        for (int t1 : {15, 20}) {
            for (int t2 : {85, 90}) {
                g.push_back(detail::cell(t1, t2, 15));
            }
        }
    } else {
        throw std::invalid_argument("unknown sweep '" + std::string(name) + "'; built-in sweeps: " +
                                    detail::builtin_list());
    }
    return spec;
}

inline RunRecord make_record(const SweepSpec& spec, const Cell& c, const RunResult& r) {
    RunRecord rec;
    rec.sweep = spec.name;
    rec.t1 = c.t1.value();
    rec.t2 = c.t2.value();
    rec.s = c.s;
    rec.seed = r.seed;
    rec.stabilised = r.stabilised;
    rec.stabilisation_step = r.stabilisation_step;
    rec.similarity_overall = r.similarity.overall;
    rec.similarity_g1 = r.similarity.group1;
    rec.similarity_g2 = r.similarity.group2;
    rec.d_hat = r.dimension ? r.dimension->d_hat : 0;
    return rec;
}

/// Statistics for one cell. Stabilisation figures use stabilised runs
/// only; similarity and dimension use every run's final state.
inline AggregateRow aggregate(std::span<const RunRecord> runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate: no runs");
    }
    AggregateRow row;
    row.t1 = runs.front().t1;
    row.t2 = runs.front().t2;
    row.s = runs.front().s;
    row.reps = runs.size();
    std::vector<double> steps;
    double d_sum = 0.0;
    for (const auto& r : runs) {
        row.similarity += r.similarity_overall;
        row.similarity_g1 += r.similarity_g1;
        row.similarity_g2 += r.similarity_g2;
        d_sum += static_cast<double>(r.d_hat);
        if (r.stabilised && r.stabilisation_step) {
            steps.push_back(static_cast<double>(*r.stabilisation_step));
        }
    }
    const double n = static_cast<double>(runs.size());
    row.similarity /= n;
    row.similarity_g1 /= n;
    row.similarity_g2 /= n;
    row.d_hat_mean = d_sum / n;
    row.stabilised_runs = steps.size();
    if (!steps.empty()) {
        double total = 0.0;
        for (double v : steps) {
            total += v;
        }
        row.stabilisation_mean = total / static_cast<double>(steps.size());
        row.stabilisation = five_number(std::move(steps));
    }
    return row;
}

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Executes every (cell, rep) run on `parallelism` workers (0 = all cores)
/// and folds the results in (cell, rep) order, so the output does not
/// depend on the worker count.
inline SweepResult run_sweep(const SweepSpec& spec, std::size_t parallelism = 0, const ProgressFn& progress = {}) {
    if (spec.grid.empty()) {
        throw std::invalid_argument("run_sweep: empty grid");
    }
    if (spec.reps == 0) {
        throw std::invalid_argument("run_sweep: reps must be at least 1");
    }
    for (const auto& c : spec.grid) {
        spec.params_for(c).validate();
    }
    const std::size_t total = spec.grid.size() * spec.reps;
    std::vector<RunRecord> raw(total);

    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) {
                return;
            }
            const std::size_t cell = job / spec.reps;
            const std::size_t rep = job % spec.reps;
            try {
                RunResult r = run(spec.params_for(spec.grid[cell]), spec.seed_for(cell, rep));
                analyse_spectrum(r, spec.k_singular);
                raw[job] = make_record(spec, spec.grid[cell], r);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(total);
                return;
            }
            if (progress) {
                std::lock_guard lock(mu);
                progress(++done, total);
            }
        }
    };

    if (parallelism == 0) {
        parallelism = std::max(1U, std::thread::hardware_concurrency());
    }
    parallelism = std::min(parallelism, total);
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(parallelism);
        for (std::size_t i = 0; i < parallelism; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    SweepResult out;
    out.rows.reserve(spec.grid.size());
    for (std::size_t c = 0; c < spec.grid.size(); ++c) {
        out.rows.push_back(aggregate(std::span<const RunRecord>(raw).subspan(c * spec.reps, spec.reps)));
    }
    out.raw = std::move(raw);
    return out;
}

// ---------------------------------------------------------------------------
// File formats

inline constexpr std::string_view aggregate_csv_header =
    "t1,t2,s,similarity,similarity_g1,similarity_g2,stabilisation_mean,stab_min,stab_q1,stab_median,stab_q3,"
    "stab_max,d_hat_mean,stabilised_runs,reps";

namespace detail {

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// JSON Lines, one run per line, in (cell, rep) order.
inline void write_raw_archive(std::ostream& os, std::span<const RunRecord> raw) {
    for (const auto& r : raw) {
        nlohmann::ordered_json j;
        j["sweep"] = r.sweep;
        j["t1"] = r.t1;
        j["t2"] = r.t2;
        j["s"] = r.s;
        j["seed"] = r.seed;
        j["stabilised"] = r.stabilised;
        j["stabilisation_step"] = r.stabilisation_step ? nlohmann::ordered_json(*r.stabilisation_step) : nlohmann::ordered_json(nullptr);
        j["similarity_overall"] = r.similarity_overall;
        j["similarity_g1"] = r.similarity_g1;
        j["similarity_g2"] = r.similarity_g2;
        j["d_hat"] = r.d_hat;
        os << j.dump() << '\n';
    }
}

inline std::vector<RunRecord> read_raw_archive(std::istream& is) {
    std::vector<RunRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            RunRecord r;
            r.sweep = j.at("sweep").get<std::string>();
            r.t1 = j.at("t1").get<double>();
            r.t2 = j.at("t2").get<double>();
            r.s = j.at("s").get<double>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.stabilised = j.at("stabilised").get<bool>();
            if (!j.at("stabilisation_step").is_null()) {
                r.stabilisation_step = j.at("stabilisation_step").get<std::size_t>();
            }
            r.similarity_overall = j.at("similarity_overall").get<double>();
            r.similarity_g1 = j.at("similarity_g1").get<double>();
            r.similarity_g2 = j.at("similarity_g2").get<double>();
            r.d_hat = j.at("d_hat").get<std::size_t>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("raw archive line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void write_aggregate_csv(std::ostream& os, std::span<const AggregateRow> rows) {
    using detail::fixed;
    os << aggregate_csv_header << '\n';
    for (const auto& r : rows) {
        os << fixed(r.t1, 2) << ',' << fixed(r.t2, 2) << ',' << fixed(r.s, 2) << ',' << fixed(r.similarity, 4) << ','
           << fixed(r.similarity_g1, 4) << ',' << fixed(r.similarity_g2, 4) << ',';
        if (r.stabilisation_mean && r.stabilisation) {
            const auto& q = *r.stabilisation;
            os << fixed(*r.stabilisation_mean, 4) << ',' << fixed(q.min, 2) << ',' << fixed(q.q1, 2) << ','
               << fixed(q.median, 2) << ',' << fixed(q.q3, 2) << ',' << fixed(q.max, 2) << ',';
        } else {
            os << ",,,,,,";
        }
        os << fixed(r.d_hat_mean, 4) << ',' << r.stabilised_runs << ',' << r.reps << '\n';
    }
}

inline std::vector<AggregateRow> read_aggregate_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || detail::trim(line) != aggregate_csv_header) {
        throw std::runtime_error("aggregate table: missing or unexpected header");
    }
    std::vector<AggregateRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto f = detail::split_csv(detail::trim(line));
        if (f.size() != 15) {
            throw std::runtime_error("aggregate table line " + std::to_string(lineno) + ": expected 15 fields");
        }
        AggregateRow r;
        r.t1 = std::stod(f[0]);
        r.t2 = std::stod(f[1]);
        r.s = std::stod(f[2]);
        r.similarity = std::stod(f[3]);
        r.similarity_g1 = std::stod(f[4]);
        r.similarity_g2 = std::stod(f[5]);
        if (!f[6].empty()) {
            r.stabilisation_mean = std::stod(f[6]);
            r.stabilisation = FiveNumber{std::stod(f[7]), std::stod(f[8]), std::stod(f[9]), std::stod(f[10]),
                                         std::stod(f[11])};
        }
        r.d_hat_mean = std::stod(f[12]);
        r.stabilised_runs = std::stoul(f[13]);
        r.reps = std::stoul(f[14]);
        rows.push_back(r);
    }
    return rows;
}

/// Reads a custom grid. Lines are either `key = value` model settings
/// (n, initial_degree, degree_floor, max_steps, init) or cells
/// `t1, t2, s`. `#` starts a comment. The sweep takes the file's stem as
/// its name.
inline SweepSpec load_custom_grid(std::istream& is, std::string name) {
    SweepSpec spec;
    spec.name = std::move(name);
    std::string raw_line;
    std::size_t lineno = 0;
    while (std::getline(is, raw_line)) {
        ++lineno;
        const auto hash = raw_line.find('#');
        const std::string line = detail::trim(std::string_view(raw_line).substr(0, hash));
        if (line.empty()) {
            continue;
        }
        auto fail = [&](const std::string& why) {
            return std::invalid_argument("grid line " + std::to_string(lineno) + ": " + why);
        };
        if (const auto eq = line.find('='); eq != std::string::npos) {
            const std::string key = detail::trim(std::string_view(line).substr(0, eq));
            const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
            auto& p = spec.params_base;
            auto count = [&]() -> std::size_t {
                std::size_t used = 0;
                try {
                    const auto v = std::stoul(value, &used);
                    if (used == value.size()) {
                        return v;
                    }
                } catch (const std::exception&) {
                }
                throw fail("bad value for '" + key + "'");
            };
            if (key == "n") {
                p.n = count();
            } else if (key == "initial_degree") {
                p.initial_degree = count();
            } else if (key == "degree_floor") {
                p.degree_floor = count();
            } else if (key == "max_steps") {
                p.max_steps = count();
            } else if (key == "init" && (value == "per_agent" || value == "fixed_edges")) {
                p.init = value == "per_agent" ? InitMode::per_agent : InitMode::fixed_edges;
            } else if (key == "init") {
                throw fail("init must be per_agent or fixed_edges");
            } else {
                throw fail("unknown setting '" + key + "'");
            }
            continue;
        }
        std::string cleaned = line;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::istringstream ss(cleaned);
        double t1 = 0, t2 = 0, s = 0;
        std::string extra;
        if (!(ss >> t1 >> t2 >> s) || (ss >> extra)) {
            throw fail("expected 't1, t2, s'");
        }
        try {
            spec.grid.push_back({Tolerance::from_double(t1), Tolerance::from_double(t2), s});
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
    }
    if (spec.grid.empty()) {
        throw std::invalid_argument("grid file has no cells");
    }
    return spec;
}

inline SweepSpec load_custom_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open grid file " + path.string());
    }
    return load_custom_grid(in, path.stem().string());
}

}  // namespace schelling
