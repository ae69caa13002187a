// End-to-end checks of the command-line tool: exit codes, artifact layout,
// determinism, checkpoint resume and cross-command consistency. Each test
// shells out to the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spheroid/csv.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBinary = CLI_BINARY_PATH;

int run_cli(const std::string& args) {
    std::string cmd = kBinary + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const char* name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kFastConfig = R"({
  "simulation": {"seed": 42, "duration_min": 1440, "dt_min": 0.5},
  "initial": {"n_cells": 12, "placement_radius_um": 30},
  "metabolism": {"k_glu": 6.6e-12, "k_ene": 0.033, "substep_min": 0.5},
  "phenotype": {"k_prolif": 0.00061, "atp_prolif": 1040}
})";

nlohmann::json load_json(const fs::path& p) {
    std::ifstream in(p);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("argument errors exit with the input-error code") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("simulate --config missing.json --out /tmp/cli_none") == 2);
    CHECK(run_cli("simulate") == 2);  // required flags absent
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("--version") == 0);
}

TEST_CASE("malformed inputs exit with the input-error code") {
    fs::path dir = fresh_dir("cli_badinput");
    write_file(dir / "conf.json", "{ not json");
    CHECK(run_cli("simulate --config " + (dir / "conf.json").string() + " --out " +
                  (dir / "out").string()) == 2);
    write_file(dir / "conf2.json", R"({"simulation": {"dt_min": -1}})");
    CHECK(run_cli("simulate --config " + (dir / "conf2.json").string() + " --out " +
                  (dir / "out").string()) == 2);
    // unknown key
    write_file(dir / "conf3.json", R"({"simulaton": {}})");
    CHECK(run_cli("simulate --config " + (dir / "conf3.json").string() + " --out " +
                  (dir / "out").string()) == 2);
    // bad thread count from the environment
    write_file(dir / "conf4.json", kFastConfig);
    std::string cmd = "SPHEROID_THREADS=abc " + kBinary + " simulate --config " +
                      (dir / "conf4.json").string() + " --out " + (dir / "out").string() +
                      " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
}

TEST_CASE("simulate writes the advertised artifacts and reruns byte-identically") {
    fs::path dir = fresh_dir("cli_sim");
    write_file(dir / "conf.json", kFastConfig);
    std::string conf = (dir / "conf.json").string();
    REQUIRE(run_cli("simulate --config " + conf + " --out " + (dir / "a").string()) == 0);
    REQUIRE(fs::exists(dir / "a" / "cells.csv"));
    REQUIRE(fs::exists(dir / "a" / "aggregate.csv"));
    REQUIRE(fs::exists(dir / "a" / "manifest.json"));

    REQUIRE(run_cli("simulate --config " + conf + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "cells.csv") == slurp(dir / "b" / "cells.csv"));
    CHECK(slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv"));

    // manifests match except for the wall clock
    nlohmann::json ma = load_json(dir / "a" / "manifest.json");
    nlohmann::json mb = load_json(dir / "b" / "manifest.json");
    ma.erase("wall_clock_seconds");
    mb.erase("wall_clock_seconds");
    // artifact paths name different directories by construction
    ma.erase("artifacts");
    mb.erase("artifacts");
    CHECK(ma == mb);
    CHECK(ma["command"] == "simulate");
    CHECK(ma["tool_version"] == "1.0.0");
    CHECK(ma["extra"]["events"].contains("divisions"));

    // a different seed changes the trace
    REQUIRE(run_cli("simulate --config " + conf + " --seed 77 --out " + (dir / "c").string()) ==
            0);
    CHECK(slurp(dir / "a" / "cells.csv") != slurp(dir / "c" / "cells.csv"));
}

TEST_CASE("zero duration emits exactly the initial state") {
    fs::path dir = fresh_dir("cli_zero");
    write_file(dir / "conf.json", R"({
      "simulation": {"seed": 1, "duration_min": 0},
      "initial": {"n_cells": 5, "placement_radius_um": 20}
    })");
    REQUIRE(run_cli("simulate --config " + (dir / "conf.json").string() + " --out " +
                    (dir / "out").string()) == 0);
    spheroid::CsvTable agg = spheroid::read_csv((dir / "out" / "aggregate.csv").string());
    REQUIRE(agg.rows.size() == 1);
    CHECK(agg.rows[0][agg.column("time_min")] == "0");
    CHECK(agg.rows[0][agg.column("cell_count")] == "5");
    spheroid::CsvTable cells = spheroid::read_csv((dir / "out" / "cells.csv").string());
    CHECK(cells.rows.size() == 5);
}

TEST_CASE("parameter overrides are applied and validated") {
    fs::path dir = fresh_dir("cli_params");
    write_file(dir / "conf.json", kFastConfig);
    std::string conf = (dir / "conf.json").string();

    // starving consumption rate kills the population
    write_file(dir / "starve.json", R"({"k_ene": 0.1, "k_glu": 5e-16})");
    REQUIRE(run_cli("simulate --config " + conf + " --params " + (dir / "starve.json").string() +
                    " --out " + (dir / "starved").string()) == 0);
    spheroid::CsvTable agg = spheroid::read_csv((dir / "starved" / "aggregate.csv").string());
    CHECK(agg.rows.back()[agg.column("cell_count")] == "0");

    write_file(dir / "bad.json", R"({"k_unknown": 1.0})");
    CHECK(run_cli("simulate --config " + conf + " --params " + (dir / "bad.json").string() +
                  " --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("simulate --config " + conf + " --params " + (dir / "nope.json").string() +
                  " --out " + (dir / "x").string()) == 2);
}

TEST_CASE("sweep resumes from a truncated checkpoint without changing results") {
    fs::path dir = fresh_dir("cli_sweep");
    write_file(dir / "conf.json", R"({
      "simulation": {"seed": 5, "duration_min": 1440, "dt_min": 0.5},
      "initial": {"n_cells": 1},
      "metabolism": {"substep_min": 0.5}
    })");
    std::string conf = (dir / "conf.json").string();
    REQUIRE(run_cli("sweep --config " + conf + " --samples 6 --seed 9 --out " +
                    (dir / "full").string()) == 0);
    std::string full = slurp(dir / "full" / "training.csv");

    // keep the header and the first five data lines (cuts sample 2 in half)
    std::istringstream in(full);
    std::ostringstream partial;
    std::string line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i) partial << line << "\n";
    fs::create_directories(dir / "resumed");
    write_file(dir / "resumed" / "training.csv", partial.str());
    fs::copy_file(dir / "full" / "training.csv.meta.json",
                  dir / "resumed" / "training.csv.meta.json");

    REQUIRE(run_cli("sweep --config " + conf + " --samples 6 --seed 9 --out " +
                    (dir / "resumed").string()) == 0);
    CHECK(slurp(dir / "resumed" / "training.csv") == full);

    // a different design is refused
    CHECK(run_cli("sweep --config " + conf + " --samples 12 --seed 9 --out " +
                  (dir / "resumed").string()) == 2);
    CHECK(run_cli("sweep --config " + conf + " --samples 6 --seed 10 --out " +
                  (dir / "resumed").string()) == 2);
}

TEST_CASE("gp-train, sobol and calibrate run off a sweep table") {
    fs::path dir = fresh_dir("cli_pipeline");
    write_file(dir / "conf.json", R"({
      "simulation": {"seed": 5, "duration_min": 1440, "dt_min": 0.5},
      "initial": {"n_cells": 1},
      "metabolism": {"substep_min": 0.5}
    })");
    std::string conf = (dir / "conf.json").string();
    REQUIRE(run_cli("sweep --config " + conf + " --samples 24 --seed 12 --out " +
                    (dir / "sw").string()) == 0);
    std::string training = (dir / "sw" / "training.csv").string();

    REQUIRE(run_cli("gp-train --training " + training + " --day 1 --restarts 4 --out " +
                    (dir / "models" / "day1.json").string()) == 0);
    REQUIRE(fs::exists(dir / "models" / "day1.json"));
    REQUIRE(fs::exists(dir / "models" / "day1.json.manifest.json"));
    nlohmann::json art = load_json(dir / "models" / "day1.json");
    CHECK(art["kind"] == "gp-rbf-ard");
    CHECK(art["bounds"].size() == 4);  // the four calibrated parameters

    // no usable rows for an unseen day
    CHECK(run_cli("gp-train --training " + training + " --day 5 --out " +
                  (dir / "models" / "day5.json").string()) == 2);

    REQUIRE(run_cli("sobol --model " + (dir / "models" / "day1.json").string() +
                    " --n 1024 --out " + (dir / "sob").string()) == 0);
    spheroid::CsvTable first =
        spheroid::read_csv((dir / "sob" / "sobol_first_total.csv").string());
    REQUIRE(first.rows.size() == 7);  // every parameter reported
    auto fo = first.column("first_order");
    auto name_col = first.column("parameter");
    for (const auto& row : first.rows) {
        if (row[name_col] == "k_aer" || row[name_col] == "k_ana" || row[name_col] == "atp_death")
            CHECK(row[fo] == "0");
    }
    CHECK(run_cli("sobol --model " + (dir / "models" / "day1.json").string() +
                  " --n 1000 --out " + (dir / "sob2").string()) == 2);

    spheroid::CsvTable table = spheroid::read_csv(training);
    CHECK(table.has_column("status"));
}

TEST_CASE("calibrate writes posteriors and enforces convergence") {
    fs::path dir = fresh_dir("cli_cal");
    // hand-built one-dimensional emulator: monotone line from 60 to 140
    fs::create_directories(dir / "models");
    write_file(dir / "models" / "day3.json",
               R"({"kind":"gp-rbf-ard","version":1,"sigma2":1.0,"noise_variance":1e-06,
"jitter":0,"y_mean":100,"y_sd":40,"training_digest":"0000000000000000",
"lengthscales":[0.6],"bounds":[{"lo":0,"hi":1}],
"inputs_normalized":[[0.0],[0.25],[0.5],[0.75],[1.0]],
"outputs_raw":[60,80,100,120,140]})");
    write_file(dir / "obs.csv", "group,day,area_um2\nwide,3,90\nwide,3,100\nwide,3,95\n");

    int code = run_cli("calibrate --observations " + (dir / "obs.csv").string() + " --models " +
                       (dir / "models").string() + " --out " + (dir / "out").string() +
                       " --chains 4 --draws 2000 --burn-in 1000 --sigma 8 --seed 4");
    REQUIRE(code == 0);
    REQUIRE(fs::exists(dir / "out" / "posterior_wide.csv"));
    REQUIRE(fs::exists(dir / "out" / "map_wide.json"));
    nlohmann::json map = load_json(dir / "out" / "map_wide.json");
    CHECK(map["warnings"].empty());
    // observations average 97ish on a line rising 60 -> 140: theta near 0.46
    double theta = map["joint_map"]["theta0"].get<double>();
    CHECK(theta > 0.3);
    CHECK(theta < 0.6);
    CHECK(map["sigma_n"]["3"].get<double>() == 8.0);

    spheroid::CsvTable post = spheroid::read_csv((dir / "out" / "posterior_wide.csv").string());
    CHECK(post.rows.size() == 8000);
    CHECK(post.has_column("theta0"));
    CHECK(post.has_column("log_density"));

    // a single observation without --sigma cannot set the noise scale
    write_file(dir / "solo.csv", "group,day,area_um2\ns,3,100\n");
    CHECK(run_cli("calibrate --observations " + (dir / "solo.csv").string() + " --models " +
                  (dir / "models").string() + " --out " + (dir / "out2").string()) == 2);
    // missing emulator for an observed day
    write_file(dir / "beyond.csv", "group,day,area_um2\nb,4,100\nb,4,90\n");
    CHECK(run_cli("calibrate --observations " + (dir / "beyond.csv").string() + " --models " +
                  (dir / "models").string() + " --out " + (dir / "out3").string()) == 2);
}

TEST_CASE("measure recomputes the aggregate table simulate wrote") {
    fs::path dir = fresh_dir("cli_measure");
    write_file(dir / "conf.json", kFastConfig);
    REQUIRE(run_cli("simulate --config " + (dir / "conf.json").string() + " --out " +
                    (dir / "sim").string()) == 0);
    REQUIRE(run_cli("measure --cells " + (dir / "sim" / "cells.csv").string() + " --out " +
                    (dir / "meas").string()) == 0);
    // positions round-trip exactly, so the recomputed aggregates match
    CHECK(slurp(dir / "meas" / "aggregate.csv") == slurp(dir / "sim" / "aggregate.csv"));
    spheroid::CsvTable metrics = spheroid::read_csv((dir / "meas" / "metrics.csv").string());
    CHECK(metrics.has_column("area_um2"));
    CHECK(metrics.has_column("volume_per_cell_um3"));
    CHECK(!metrics.rows.empty());
}

TEST_CASE("compare requires two inputs and sees no effect between identical groups") {
    fs::path dir = fresh_dir("cli_cmp");
    std::string csv = "replicate,largest_area_um2,cell_count\n";
    for (int i = 0; i < 8; ++i)
        csv += std::to_string(i) + "," + std::to_string(5000 + 13 * (i % 5)) + "," +
               std::to_string(100 + i) + "\n";
    write_file(dir / "s1.csv", csv);
    write_file(dir / "s2.csv", csv);
    CHECK(run_cli("compare --inputs " + (dir / "s1.csv").string() + " --out " +
                  (dir / "out").string()) == 2);
    REQUIRE(run_cli("compare --inputs " + (dir / "s1.csv").string() + " " +
                    (dir / "s2.csv").string() + " --out " + (dir / "out").string()) == 0);
    spheroid::CsvTable rep = spheroid::read_csv((dir / "out" / "compare_report.csv").string());
    auto sig = rep.column("significant");
    auto metric = rep.column("metric");
    for (const auto& row : rep.rows) {
        INFO(row[metric]);
        CHECK(row[sig] == "no");
    }
    // replicate is a key column, not a metric
    for (const auto& row : rep.rows) CHECK(row[metric] != "replicate");

    write_file(dir / "s3.csv", "unrelated_header\n1\n2\n3\n");
    CHECK(run_cli("compare --inputs " + (dir / "s1.csv").string() + " " +
                  (dir / "s3.csv").string() + " --out " + (dir / "out2").string()) == 2);
}
