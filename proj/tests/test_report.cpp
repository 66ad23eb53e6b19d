#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "schelling/report.hpp"

using namespace schelling;
namespace fs = std::filesystem;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("schelling_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Rows shaped like a sweep grid, with stabilisation stats only where
// `stable` says so.
std::vector<AggregateRow> rows_for(const SweepSpec& spec, auto stable) {
    std::vector<AggregateRow> rows;
    for (const auto& c : spec.grid) {
        AggregateRow r;
        r.t1 = c.t1.value();
        r.t2 = c.t2.value();
        r.s = c.s;
        r.similarity = 0.5 + 0.4 * r.t1;
        r.similarity_g1 = r.similarity;
        r.similarity_g2 = r.similarity;
        r.d_hat_mean = r.t1 > 0.7 ? 2.0 : 1.0;
        r.reps = 10;
        if (stable(c)) {
            r.stabilised_runs = 10;
            r.stabilisation_mean = 20.0;
            r.stabilisation = FiveNumber{10, 15, 20, 25, 30};
        }
        rows.push_back(r);
    }
    return rows;
}

struct Cli {
    int code = -1;
    std::string out;
    std::string err;
};

Cli run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        std::string(SCHELLING_SWEEP_EXE) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    Cli r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

const char* small_grid =
    "n = 120\n"
    "initial_degree = 20\n"
    "degree_floor = 10\n"
    "0.3, 0.3, 0.5\n"
    "0.8, 0.8, 0.5\n";

}  // namespace

TEST_CASE("one stabilisation box per stabilising cell", "[report]") {
    const auto sym = builtin_sweep("symmetric");
    const auto sym_rows = rows_for(sym, [](const Cell&) { return true; });
    std::vector<plots::Box> boxes;
    for (const auto& r : sym_rows) {
        boxes.push_back({"x", r.stabilisation});
    }
    CHECK(count_of(plots::boxplot_svg("t", "x", "y", boxes), "class=\"box\"") == 20);

    const auto gs = builtin_sweep("groupsize");
    const auto gs_rows = rows_for(gs, [](const Cell& c) { return !(c.s == 0.05 && c.t1.hundredths() == 95); });
    const fs::path dir = scratch("boxes");
    const auto written = plots::emit_plots(gs_rows, {}, dir, "groupsize");
    REQUIRE(written.size() == 4);
    CHECK(count_of(slurp(dir / "groupsize_stabilisation.svg"), "class=\"box\"") == 39);
    // No raw runs, so every similarity slot is empty.
    CHECK(count_of(slurp(dir / "groupsize_similarity_box.svg"), "class=\"box\"") == 0);
}

TEST_CASE("cell labels show only the varying parameters", "[report]") {
    std::string axis;
    const auto sym = rows_for(builtin_sweep("symmetric"), [](const Cell&) { return true; });
    const auto labels = plots::cell_labels(sym, &axis);
    CHECK(axis == "t");
    CHECK(labels.front() == "0.05");
    const auto gs = rows_for(builtin_sweep("groupsize"), [](const Cell&) { return true; });
    CHECK(plots::cell_labels(gs, &axis)[1] == "0.05/0.50");
    CHECK(axis == "s/t");
    const auto asym = rows_for(builtin_sweep("asymmetric"), [](const Cell&) { return true; });
    CHECK(plots::cell_labels(asym, &axis)[0] == "0.50/0.05");
    CHECK(axis == "t1/t2");
}

TEST_CASE("plots regenerate byte-identically from the output files", "[report]") {
    const fs::path dir = scratch("regen");
    write_file(dir / "tiny.grid", small_grid);
    Config cfg;
    cfg.sweep = (dir / "tiny.grid").string();
    cfg.reps = 3;
    cfg.seed = 4;
    cfg.k_singular = 30;
    cfg.out_dir = dir / "out";
    cfg.emit_plots = true;
    const auto outputs = execute(cfg);
    REQUIRE(outputs.plots.size() == 4);
    CHECK(outputs.raw == dir / "out" / "tiny_raw.txt");
    CHECK(outputs.aggregate == dir / "out" / "tiny_agg.csv");

    const auto again = emit_plots_from_files(outputs.aggregate, outputs.raw, dir / "again", "tiny");
    REQUIRE(again.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        INFO(outputs.plots[i]);
        CHECK(slurp(outputs.plots[i]) == slurp(again[i]));
        CHECK(slurp(again[i]).rfind("<svg", 0) == 0);
    }
    CHECK_THROWS_AS(emit_plots_from_files(dir / "missing.csv", outputs.raw, dir, "x"), IoError);
}

TEST_CASE("configuration errors are usage errors", "[report]") {
    Config cfg;
    cfg.sweep = "nosuch";
    CHECK_THROWS_AS(resolve_sweep(cfg), UsageError);
    cfg.sweep = "symmetric";
    cfg.reps = 0;
    CHECK_THROWS_AS(resolve_sweep(cfg), UsageError);
    cfg.reps = 1;
    cfg.k_singular = 2;
    CHECK_THROWS_AS(resolve_sweep(cfg), UsageError);
    cfg.k_singular = 120;
    cfg.seed = 9;
    const auto spec = resolve_sweep(cfg);
    CHECK(spec.reps == 1);
    CHECK(spec.base_seed == 9);

    const fs::path dir = scratch("usage");
    write_file(dir / "bad.grid", "0.5, 0.5, 0.9\n");
    cfg.sweep = (dir / "bad.grid").string();
    CHECK_THROWS_AS(resolve_sweep(cfg), UsageError);
}

TEST_CASE("command line: outputs and determinism", "[report][cli]") {
    const fs::path dir = scratch("cli");
    write_file(dir / "tiny.grid", small_grid);
    const std::string base = "--sweep " + (dir / "tiny.grid").string() + " --reps 2 --k 30 -q --seed 11";
    const auto first = run_cli(base + " --out " + (dir / "a").string() + " --plots", dir);
    REQUIRE(first.code == 0);
    CHECK(first.out.find("tiny_raw.txt") != std::string::npos);
    CHECK(first.out.find("tiny_dimension.svg") != std::string::npos);
    CHECK(first.err.empty());
    for (const char* f : {"tiny_raw.txt", "tiny_agg.csv", "tiny_stabilisation.svg", "tiny_similarity_box.svg",
                          "tiny_similarity.svg", "tiny_dimension.svg"}) {
        CHECK(fs::exists(dir / "a" / f));
    }
    const auto second = run_cli(base + " --out " + (dir / "b").string() + " --jobs 3", dir);
    REQUIRE(second.code == 0);
    CHECK(slurp(dir / "a" / "tiny_raw.txt") == slurp(dir / "b" / "tiny_raw.txt"));
    CHECK(slurp(dir / "a" / "tiny_agg.csv") == slurp(dir / "b" / "tiny_agg.csv"));
    CHECK_FALSE(fs::exists(dir / "b" / "tiny_dimension.svg"));
}

TEST_CASE("command line: built-in sweep with one repetition", "[report][cli]") {
    const fs::path dir = scratch("cli_builtin");
    const auto r = run_cli("--sweep minority-large --reps 1 -q --out " + (dir / "out").string(), dir);
    REQUIRE(r.code == 0);
    std::ifstream agg(dir / "out" / "minority-large_agg.csv");
    const auto rows = read_aggregate_csv(agg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].s == 0.15);
    CHECK(rows[3].t1 == 0.9);
}

TEST_CASE("command line: config file supplies flags", "[report][cli]") {
    const fs::path dir = scratch("cli_config");
    write_file(dir / "tiny.grid", small_grid);
    write_file(dir / "run.ini", "sweep = " + (dir / "tiny.grid").string() + "\nreps = 1\nk = 20\nquiet = true\nout = " +
                                    (dir / "cfg").string() + "\n");
    const auto r = run_cli("--config " + (dir / "run.ini").string(), dir);
    REQUIRE(r.code == 0);
    std::ifstream agg(dir / "cfg" / "tiny_agg.csv");
    const auto rows = read_aggregate_csv(agg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].reps == 1);
}

TEST_CASE("command line: errors and exit codes", "[report][cli]") {
    const fs::path dir = scratch("cli_errors");
    const auto unknown = run_cli("--sweep nosuch --out " + (dir / "x").string(), dir);
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("symmetric, asymmetric, groupsize, minority-large, minority-small") != std::string::npos);

    CHECK(run_cli("--reps 3", dir).code == 2);
    CHECK(run_cli("--sweep symmetric --reps many", dir).code == 2);
    CHECK(run_cli("--help", dir).code == 0);

    write_file(dir / "tiny.grid", small_grid);
    write_file(dir / "blocker", "not a directory");
    const auto io = run_cli("--sweep " + (dir / "tiny.grid").string() + " --reps 1 --k 20 -q --out " +
                                (dir / "blocker" / "sub").string(),
                            dir);
    CHECK(io.code == 1);
    CHECK(io.err.find("error:") != std::string::npos);
}
