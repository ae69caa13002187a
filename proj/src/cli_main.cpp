// Command-line front end: simulate, sweep, gp-train, sobol, calibrate,
// measure, compare. Every command writes its artifacts plus a manifest with
// input digests; outputs are deterministic for a fixed seed.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spheroid/config.hpp"
#include "spheroid/csv.hpp"
#include "spheroid/design.hpp"
#include "spheroid/error.hpp"
#include "spheroid/gp.hpp"
#include "spheroid/manifest.hpp"
#include "spheroid/measure.hpp"
#include "spheroid/params.hpp"
#include "spheroid/rng.hpp"
#include "spheroid/simulation.hpp"
#include "spheroid/stats.hpp"
#include "spheroid/sweep.hpp"
#include "spheroid/uq.hpp"

namespace fs = std::filesystem;
using namespace spheroid;

namespace {

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

int threads_from_env() {
    const char* env = std::getenv("SPHEROID_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1024)
        throw InputError("SPHEROID_THREADS must be a positive integer");
    return static_cast<int>(v);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

// indices of the calibrated (non-degenerate) parameters in canonical order
std::vector<std::size_t> varying_indices() {
    auto box = parameter_bounds();
    std::vector<std::size_t> idx;
    for (std::size_t d = 0; d < box.size(); ++d)
        if (!box[d].degenerate()) idx.push_back(d);
    return idx;
}

struct AggregateRow {
    double day = 0.0;
    double time_min = 0.0;
    std::uint64_t cell_count = 0;
    std::size_t spheroid_count = 0;
    double largest_area = 0.0;
    double median_area = 0.0;
    double mean_area = 0.0;
    double total_area = 0.0;
    double mean_volume_per_cell = 0.0;
};

AggregateRow aggregate_from(const MorphologyReport& report, double time_min) {
    AggregateRow row;
    row.day = time_min / 1440.0;
    row.time_min = time_min;
    row.cell_count = report.total_cells;
    row.spheroid_count = report.spheroids.size();
    std::vector<double> areas;
    for (const auto& s : report.spheroids) {
        areas.push_back(s.area_um2);
        row.total_area += s.area_um2;
        row.mean_volume_per_cell += s.volume_per_cell_um3;
    }
    if (!areas.empty()) {
        std::sort(areas.begin(), areas.end());
        row.largest_area = areas.back();
        std::size_t n = areas.size();
        row.median_area = n % 2 ? areas[n / 2] : 0.5 * (areas[n / 2 - 1] + areas[n / 2]);
        row.mean_area = row.total_area / static_cast<double>(n);
        row.mean_volume_per_cell /= static_cast<double>(n);
    }
    return row;
}

const std::vector<std::string> kAggregateHeader = {
    "day",       "time_min",      "cell_count",    "spheroid_count",         "largest_area_um2",
    "median_area_um2", "mean_area_um2", "total_area_um2", "mean_volume_per_cell_um3"};

void write_aggregate_row(CsvWriter& w, const AggregateRow& r) {
    w.write_row({format_double(r.day), format_double(r.time_min), std::to_string(r.cell_count),
                 std::to_string(r.spheroid_count), format_double(r.largest_area),
                 format_double(r.median_area), format_double(r.mean_area),
                 format_double(r.total_area), format_double(r.mean_volume_per_cell)});
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const std::string& params_path,
                 const std::string& out_dir, std::uint64_t seed, bool seed_set, int threads) {
    Timer timer;
    SimConfig cfg = load_config(config_path);
    if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) throw InputError("parameter file not found: '" + params_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError("malformed parameter file '" + params_path + "': " + e.what());
        }
        ParameterVector pv;
        pv.k_glu = cfg.met.k_glu;
        pv.k_aer = cfg.met.k_aer;
        pv.k_ana = cfg.met.k_ana;
        pv.k_ene = cfg.met.k_ene;
        pv.k_prolif = cfg.phen.k_prolif;
        pv.atp_prolif = cfg.phen.atp_prolif;
        pv.atp_death = cfg.phen.atp_death;
        auto arr = pv.to_array();
        const auto& names = ParameterVector::names();
        for (const auto& [key, value] : j.items()) {
            auto it = std::find(names.begin(), names.end(), key);
            if (it == names.end())
                throw InputError("unknown parameter '" + key + "' in '" + params_path + "'");
            if (!value.is_number())
                throw InputError("parameter '" + key + "' must be a number");
            arr[static_cast<std::size_t>(it - names.begin())] = value.get<double>();
        }
        cfg = with_parameters(cfg, ParameterVector::from_array(arr));
    }
    if (seed_set) cfg.seed = seed;
    cfg.validate();
    ensure_dir(out_dir);

    std::string cells_path = join_path(out_dir, "cells.csv");
    std::string agg_path = join_path(out_dir, "aggregate.csv");
    CsvWriter cells(cells_path, {"day", "time_min", "cell_id", "x_um", "y_um", "z_um",
                                 "phenotype", "atp"});
    CsvWriter agg(agg_path, kAggregateHeader);

    Simulation sim(cfg, threads);
    sim.initialize();
    sim.run([&](const Snapshot& snap) {
        for (const auto& c : snap.cells) {
            cells.write_row({format_double(snap.time_min / 1440.0), format_double(snap.time_min),
                             std::to_string(c.id), format_double(c.position.x),
                             format_double(c.position.y), format_double(c.position.z),
                             to_string(c.phenotype), format_double(c.metabolic.atp)});
        }
        write_aggregate_row(agg, aggregate_from(measure(snap.cells), snap.time_min));
    });
    cells.flush();
    agg.flush();

    RunManifest man;
    man.command = "simulate";
    man.config_digest = fnv1a_hex(config_to_json_text(cfg));
    man.seed = cfg.seed;
    man.artifacts = {cells_path, agg_path};
    man.extra["inputs"] = {{config_path, file_digest(config_path)}};
    if (!params_path.empty()) man.extra["inputs"][params_path] = file_digest(params_path);
    man.extra["events"] = {{"divisions", sim.events().divisions},
                           {"deaths", sim.events().deaths},
                           {"metabolite_floor_events", sim.events().metabolite_floor_events},
                           {"coincident_pairs", sim.events().coincident_pairs}};
    man.extra["final_population"] = sim.cells().size();
    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    std::printf("simulate: %zu cells after %.0f min -> %s\n", sim.cells().size(), sim.time_min(),
                out_dir.c_str());
    return 0;
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, std::size_t samples, std::size_t replicates,
              const std::string& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    SimConfig base = load_config(config_path);
    base.validate();
    ensure_dir(out_dir);
    std::string csv_path = join_path(out_dir, "training.csv");

    SweepOptions opts;
    opts.samples = samples;
    opts.replicates = replicates;
    opts.seed = seed;
    opts.threads = threads;
    auto box_arr = parameter_bounds();
    std::vector<Bounds> box(box_arr.begin(), box_arr.end());
    auto outcome = run_sweep(base, box, opts, csv_path);

    RunManifest man;
    man.command = "sweep";
    man.config_digest = fnv1a_hex(config_to_json_text(base));
    man.seed = seed;
    man.artifacts = {csv_path};
    man.extra["inputs"] = {{config_path, file_digest(config_path)}};
    man.extra["samples"] = samples;
    man.extra["replicates"] = replicates;
    man.extra["completed"] = outcome.completed;
    man.extra["skipped"] = outcome.skipped;
    man.extra["failed"] = outcome.failed;
    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    std::printf("sweep: %zu new, %zu resumed, %zu failed -> %s\n", outcome.completed,
                outcome.skipped, outcome.failed, csv_path.c_str());
    return 0;
}

// ---------------------------------------------------------------- gp-train

TrainingSet training_from_csv(const std::string& csv_path, int day) {
    CsvTable table = read_csv(csv_path);
    auto idx = varying_indices();
    auto all_bounds = parameter_bounds();
    const auto& names = ParameterVector::names();
    std::vector<std::size_t> cols;
    std::vector<Bounds> box;
    for (auto d : idx) {
        cols.push_back(table.column(names[d]));
        box.push_back(all_bounds[d]);
    }
    std::size_t day_col = table.column("day");
    std::size_t area_col = table.column("area_um2");
    std::size_t status_col = table.column("status");

    std::vector<std::vector<double>> rows;
    std::vector<double> outputs;
    for (const auto& row : table.rows) {
        if (row[status_col] != "ok") continue;
        if (parse_double(row[day_col], csv_path) != static_cast<double>(day)) continue;
        std::vector<double> x;
        for (auto c : cols) x.push_back(parse_double(row[c], csv_path));
        rows.push_back(std::move(x));
        outputs.push_back(parse_double(row[area_col], csv_path));
    }
    if (rows.size() < 2)
        throw InputError("training file has fewer than 2 usable rows for day " +
                         std::to_string(day));
    TrainingSet data;
    data.inputs.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(cols.size()));
    data.outputs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            data.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        data.outputs(static_cast<Eigen::Index>(i)) = outputs[i];
    }
    data.box = box;
    return data;
}

int cmd_gp_train(const std::string& training_path, int day, const std::string& out_path,
                 std::size_t restarts, std::uint64_t seed) {
    Timer timer;
    TrainingSet data = training_from_csv(training_path, day);
    RngStream stream(seed, 0x69);
    auto draws = stream.draws(rng_purpose::kSampling, 0);
    GPModel model = fit_gp(data, restarts, draws);
    if (fs::path(out_path).has_parent_path()) ensure_dir(fs::path(out_path).parent_path().string());
    model.save(out_path);

    RunManifest man;
    man.command = "gp-train";
    man.config_digest = file_digest(training_path);
    man.seed = seed;
    man.artifacts = {out_path};
    man.extra["inputs"] = {{training_path, file_digest(training_path)}};
    man.extra["day"] = day;
    man.extra["training_rows"] = static_cast<std::size_t>(data.inputs.rows());
    man.extra["log_marginal_likelihood"] = model.log_marginal_likelihood();
    man.extra["noise_variance"] = model.noise_variance();
    man.wall_clock_seconds = timer.seconds();
    man.write(out_path + ".manifest.json");
    std::printf("gp-train: day %d, %zu rows, log-ml %.3f -> %s\n", day,
                static_cast<std::size_t>(data.inputs.rows()), model.log_marginal_likelihood(),
                out_path.c_str());
    return 0;
}

// ------------------------------------------------------------------- sobol

int cmd_sobol(const std::string& model_path, std::size_t n, const std::string& out_dir,
              std::uint64_t seed) {
    Timer timer;
    GPModel model = GPModel::load(model_path);
    auto idx = varying_indices();
    if (model.input_dim() != idx.size())
        throw InputError("model dimension does not match the calibrated parameter count");
    auto box_arr = parameter_bounds();
    std::vector<Bounds> box(box_arr.begin(), box_arr.end());
    for (std::size_t k = 0; k < idx.size(); ++k) box[idx[k]] = model.box()[k];

    ModelFn f = [&](const std::vector<double>& theta) {
        std::vector<double> x;
        x.reserve(idx.size());
        for (auto d : idx) x.push_back(theta[d]);
        return model.predict(x).mean;
    };
    RngStream stream(seed, 0x50B);
    auto draws = stream.draws(rng_purpose::kSampling, 0);
    SobolResult res = sobol_indices(f, box, n, draws);

    ensure_dir(out_dir);
    std::string first_path = join_path(out_dir, "sobol_first_total.csv");
    std::string second_path = join_path(out_dir, "sobol_second_order.csv");
    const auto& names = ParameterVector::names();
    {
        CsvWriter w(first_path, {"parameter", "first_order", "total_order"});
        for (std::size_t d = 0; d < names.size(); ++d)
            w.write_row({names[d], format_double(res.first_order[d]),
                         format_double(res.total_order[d])});
    }
    {
        CsvWriter w(second_path, {"parameter_i", "parameter_j", "second_order"});
        for (std::size_t p = 0; p < names.size(); ++p)
            for (std::size_t q = p + 1; q < names.size(); ++q)
                w.write_row({names[p], names[q],
                             format_double(res.second_order(static_cast<Eigen::Index>(p),
                                                            static_cast<Eigen::Index>(q)))});
    }

    RunManifest man;
    man.command = "sobol";
    man.config_digest = file_digest(model_path);
    man.seed = seed;
    man.artifacts = {first_path, second_path};
    man.extra["inputs"] = {{model_path, file_digest(model_path)}};
    man.extra["base_samples"] = res.base_samples;
    man.extra["evaluations"] = res.evaluations;
    man.extra["output_variance"] = res.output_variance;
    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    std::printf("sobol: N=%zu, %zu evaluations -> %s\n", res.base_samples, res.evaluations,
                out_dir.c_str());
    return 0;
}

// --------------------------------------------------------------- calibrate

int cmd_calibrate(const std::string& obs_path, const std::string& models_dir,
                  const std::string& out_dir, std::size_t chains, std::size_t draws_n,
                  std::size_t burn_in, double sigma_override, std::uint64_t seed) {
    Timer timer;
    CsvTable table = read_csv(obs_path);
    std::size_t group_col = table.column("group");
    std::size_t day_col = table.column("day");
    std::size_t area_col = table.column("area_um2");
    if (table.rows.empty()) throw InputError("observation file '" + obs_path + "' has no rows");

    std::map<std::string, std::map<int, std::vector<double>>> grouped;
    for (const auto& row : table.rows) {
        int day = static_cast<int>(parse_double(row[day_col], obs_path));
        grouped[row[group_col]][day].push_back(parse_double(row[area_col], obs_path));
    }

    // one emulator per observed day, shared across groups
    std::set<int> all_days;
    for (const auto& [group, days] : grouped)
        for (const auto& [day, areas] : days) all_days.insert(day);
    std::map<int, GPModel> models;
    for (int day : all_days) {
        std::string path = join_path(models_dir, "day" + std::to_string(day) + ".json");
        if (!fs::exists(path))
            throw InputError("no emulator artifact for day " + std::to_string(day) +
                             " (expected '" + path + "')");
        models.emplace(day, GPModel::load(path));
    }
    std::vector<Bounds> priors;
    if (!models.empty()) priors = models.begin()->second.box();
    for (const auto& [day, m] : models)
        if (m.box().size() != priors.size())
            throw InputError("emulator artifacts disagree on parameter dimension");

    ensure_dir(out_dir);
    // canonical names when the emulator covers the calibrated parameters,
    // positional names otherwise
    auto idx = varying_indices();
    std::vector<std::string> dim_names;
    for (std::size_t k = 0; k < priors.size(); ++k) {
        if (priors.size() == idx.size())
            dim_names.push_back(ParameterVector::names()[idx[k]]);
        else
            dim_names.push_back("theta" + std::to_string(k));
    }
    RngStream base(seed, 0xCA1);

    RunManifest man;
    man.command = "calibrate";
    man.config_digest = file_digest(obs_path);
    man.seed = seed;
    man.extra["inputs"] = {{obs_path, file_digest(obs_path)}};
    bool any_convergence_failure = false;

    McmcOptions opts;
    opts.chains = chains;
    opts.draws_per_chain = draws_n;
    opts.burn_in = burn_in;

    for (const auto& [group, day_map] : grouped) {
        ObservationSet obs;
        obs.group = group;
        for (const auto& [day, areas] : day_map) {
            ObservationSet::Day d;
            d.day = day;
            d.areas_um2 = areas;
            if (sigma_override > 0.0) {
                d.sigma_n = sigma_override;
            } else {
                if (areas.size() < 2)
                    throw InputError("group '" + group + "' day " + std::to_string(day) +
                                     " has a single observation; pass --sigma");
                double mu = 0.0;
                for (double a : areas) mu += a;
                mu /= static_cast<double>(areas.size());
                double s2 = 0.0;
                for (double a : areas) s2 += (a - mu) * (a - mu);
                d.sigma_n = std::sqrt(s2 / static_cast<double>(areas.size() - 1));
                if (!(d.sigma_n > 0.0))
                    throw InputError("group '" + group + "' day " + std::to_string(day) +
                                     " has zero spread; pass --sigma");
            }
            obs.days.push_back(d);
        }
        std::sort(obs.days.begin(), obs.days.end(),
                  [](const auto& a, const auto& b) { return a.day < b.day; });

        Posterior post = calibrate(obs, models, priors, opts, base.with_id(fnv1a64(group)));

        std::string post_path = join_path(out_dir, "posterior_" + group + ".csv");
        {
            std::vector<std::string> header{"draw"};
            for (const auto& n : dim_names) header.push_back(n);
            header.push_back("log_density");
            CsvWriter w(post_path, header);
            for (Eigen::Index r = 0; r < post.samples.rows(); ++r) {
                std::vector<std::string> row{std::to_string(r)};
                for (Eigen::Index c = 0; c < post.samples.cols(); ++c)
                    row.push_back(format_double(post.samples(r, c)));
                row.push_back(format_double(post.log_density[static_cast<std::size_t>(r)]));
                w.write_row(row);
            }
        }

        nlohmann::json report;
        report["group"] = group;
        for (std::size_t k = 0; k < dim_names.size(); ++k) {
            report["joint_map"][dim_names[k]] = post.joint_map[k];
            report["marginal_map"][dim_names[k]] = post.marginal_map[k];
            report["rhat"][dim_names[k]] = post.rhat[k];
        }
        report["joint_map_log_density"] = post.joint_map_log_density;
        report["acceptance_rate"] = post.acceptance_rate;
        report["warnings"] = post.warnings;
        for (const auto& d : obs.days)
            report["sigma_n"][std::to_string(d.day)] = d.sigma_n;
        std::string map_path = join_path(out_dir, "map_" + group + ".json");
        {
            std::ofstream out(map_path);
            if (!out) throw InputError("cannot open '" + map_path + "' for writing");
            out << report.dump(1) << '\n';
        }
        man.artifacts.push_back(post_path);
        man.artifacts.push_back(map_path);
        if (!post.warnings.empty()) any_convergence_failure = true;
        std::printf("calibrate: group %s, acceptance %.2f%s\n", group.c_str(),
                    post.acceptance_rate, post.warnings.empty() ? "" : " [convergence warning]");
    }

    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    if (any_convergence_failure) {
        std::fprintf(stderr, "calibrate: convergence diagnostics failed; see map reports\n");
        return 3;
    }
    return 0;
}

// ----------------------------------------------------------------- measure

int cmd_measure(const std::string& cells_path, const std::string& out_dir) {
    Timer timer;
    CsvTable table = read_csv(cells_path);
    std::size_t time_col = table.column("time_min");
    std::size_t x_col = table.column("x_um");
    std::size_t y_col = table.column("y_um");
    std::size_t z_col = table.column("z_um");
    bool has_phen = table.has_column("phenotype");
    std::size_t phen_col = has_phen ? table.column("phenotype") : 0;

    // group rows into snapshots by time, preserving file order
    std::vector<double> times;
    std::map<double, std::vector<Cell>> snapshots;
    for (const auto& row : table.rows) {
        double t = parse_double(row[time_col], cells_path);
        if (!snapshots.count(t)) times.push_back(t);
        Cell c;
        c.position = {parse_double(row[x_col], cells_path), parse_double(row[y_col], cells_path),
                      parse_double(row[z_col], cells_path)};
        c.id = snapshots[t].size();
        if (has_phen) c.phenotype = phenotype_from_string(row[phen_col]);
        snapshots[t].push_back(c);
    }
    if (snapshots.empty()) throw InputError("cell file '" + cells_path + "' has no rows");

    ensure_dir(out_dir);
    std::string metrics_path = join_path(out_dir, "metrics.csv");
    std::string agg_path = join_path(out_dir, "aggregate.csv");
    CsvWriter metrics(metrics_path,
                      {"day", "time_min", "spheroid", "cell_count", "centroid_x_um",
                       "centroid_y_um", "centroid_z_um", "area_um2", "volume_per_cell_um3"});
    CsvWriter agg(agg_path, kAggregateHeader);
    std::sort(times.begin(), times.end());
    for (double t : times) {
        MorphologyReport report = measure(snapshots[t]);
        for (std::size_t s = 0; s < report.spheroids.size(); ++s) {
            const auto& sp = report.spheroids[s];
            metrics.write_row({format_double(t / 1440.0), format_double(t), std::to_string(s),
                               std::to_string(sp.cell_count), format_double(sp.centroid.x),
                               format_double(sp.centroid.y), format_double(sp.centroid.z),
                               format_double(sp.area_um2), format_double(sp.volume_per_cell_um3)});
        }
        write_aggregate_row(agg, aggregate_from(report, t));
    }

    RunManifest man;
    man.command = "measure";
    man.config_digest = file_digest(cells_path);
    man.extra["inputs"] = {{cells_path, file_digest(cells_path)}};
    man.artifacts = {metrics_path, agg_path};
    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    std::printf("measure: %zu snapshots -> %s\n", times.size(), out_dir.c_str());
    return 0;
}

// ----------------------------------------------------------------- compare

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out_dir, double alpha,
                std::vector<std::string> metrics) {
    Timer timer;
    if (inputs.size() < 2) throw InputError("compare needs at least 2 scenario files");
    std::vector<CsvTable> tables;
    for (const auto& path : inputs) tables.push_back(read_csv(path));

    const std::set<std::string> excluded = {"replicate", "sample", "day",     "time_min",
                                            "spheroid",  "group",  "cell_id", "status",
                                            "draw",      "step"};
    if (metrics.empty()) {
        // intersection of numeric columns across every file
        for (const auto& name : tables[0].header) {
            if (excluded.count(name)) continue;
            bool in_all = true;
            for (const auto& t : tables)
                if (!t.has_column(name)) in_all = false;
            if (in_all) metrics.push_back(name);
        }
        if (metrics.empty())
            throw InputError("scenario files share no comparable metric columns");
    } else {
        for (const auto& m : metrics)
            for (std::size_t i = 0; i < tables.size(); ++i)
                if (!tables[i].has_column(m))
                    throw InputError("scenario file '" + inputs[i] + "' lacks metric column '" +
                                     m + "'");
    }

    ensure_dir(out_dir);
    std::string report_path = join_path(out_dir, "compare_report.csv");
    std::string pair_path = join_path(out_dir, "compare_pairwise.csv");
    CsvWriter report(report_path, {"metric", "route", "omnibus_statistic", "omnibus_p",
                                   "levene_statistic", "levene_p", "min_normality_p",
                                   "significant"});
    CsvWriter pairs(pair_path, {"metric", "scenario_i", "scenario_j", "posthoc", "statistic",
                                "p_adjusted", "significant"});

    // scenario labels: file stems, disambiguated by the parent directory
    std::vector<std::string> labels;
    {
        std::set<std::string> stems;
        bool collide = false;
        for (const auto& p : inputs) {
            if (!stems.insert(fs::path(p).stem().string()).second) collide = true;
        }
        for (const auto& p : inputs) {
            fs::path fp(p);
            labels.push_back(collide ? fp.parent_path().filename().string() + "/" +
                                           fp.stem().string()
                                     : fp.stem().string());
        }
    }

    for (const auto& metric : metrics) {
        GroupedSamples data;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            auto col = tables[i].column(metric);
            std::vector<double> values;
            for (const auto& row : tables[i].rows)
                values.push_back(parse_double(row[col], inputs[i]));
            data.names.push_back(labels[i]);
            data.groups.push_back(std::move(values));
        }
        TestReport tr;
        try {
            tr = select_and_run(data, alpha);
        } catch (const InputError& e) {
            // degenerate metric (constant groups, too few values): note and move on
            report.write_row({metric, std::string("skipped: ") + e.what(), "nan", "nan", "nan",
                              "nan", "nan", "no"});
            continue;
        }
        double min_norm_p = 1.0;
        for (const auto& n : tr.normality) min_norm_p = std::min(min_norm_p, n.p);
        report.write_row({metric, tr.omnibus, format_double(tr.omnibus_statistic),
                          format_double(tr.omnibus_p), format_double(tr.levene_statistic),
                          format_double(tr.levene_p), format_double(min_norm_p),
                          tr.omnibus_p < alpha ? "yes" : "no"});
        for (const auto& pr : tr.pairwise) {
            pairs.write_row({metric, data.names[pr.i], data.names[pr.j], tr.posthoc,
                             format_double(pr.statistic), format_double(pr.p_adjusted),
                             pr.significant ? "yes" : "no"});
        }
    }

    RunManifest man;
    man.command = "compare";
    nlohmann::json in_digests = nlohmann::json::object();
    for (const auto& path : inputs) in_digests[path] = file_digest(path);
    man.extra["inputs"] = in_digests;
    man.config_digest = fnv1a_hex(in_digests.dump());
    man.artifacts = {report_path, pair_path};
    man.extra["alpha"] = alpha;
    man.extra["metrics"] = metrics;
    man.wall_clock_seconds = timer.seconds();
    man.write(join_path(out_dir, "manifest.json"));
    std::printf("compare: %zu metrics across %zu scenarios -> %s\n", metrics.size(),
                inputs.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agent-based tumour spheroid simulator and calibration pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, params_path, out_path, training_path, model_path, obs_path,
        models_dir, cells_path;
    std::vector<std::string> compare_inputs;
    std::vector<std::string> compare_metrics;
    std::uint64_t seed = 1;
    std::size_t samples = 1024, replicates = 1, restarts = 8;
    std::size_t n_sobol = 16384, chains = 4, draws_n = 5000, burn_in = 5000;
    int day = 7;
    int threads = 0;
    double alpha = 0.05, sigma_override = 0.0;

    auto add_threads = [&](CLI::App* cmd) {
        cmd->add_option("--threads", threads, "worker threads (default: SPHEROID_THREADS or 1)");
    };

    auto* sim = app.add_subcommand("simulate", "run one simulation and write trace + metrics");
    sim->add_option("--config", config_path, "simulation config JSON")->required();
    sim->add_option("--params", params_path, "JSON overriding swept parameters");
    sim->add_option("--out", out_path, "output directory")->required();
    auto* sim_seed = sim->add_option("--seed", seed, "override the config seed");
    add_threads(sim);

    auto* sweep = app.add_subcommand("sweep", "latin-hypercube sweep building a training table");
    sweep->add_option("--config", config_path, "base simulation config JSON")->required();
    sweep->add_option("--samples", samples, "design size")->required();
    sweep->add_option("--replicates", replicates, "replicates averaged per sample");
    sweep->add_option("--out", out_path, "output directory")->required();
    sweep->add_option("--seed", seed, "design + simulation seed");
    add_threads(sweep);

    auto* gp = app.add_subcommand("gp-train", "fit the day emulator from a training table");
    gp->add_option("--training", training_path, "sweep training CSV")->required();
    gp->add_option("--day", day, "response day to emulate");
    gp->add_option("--out", out_path, "model artifact path")->required();
    gp->add_option("--restarts", restarts, "optimizer restarts");
    gp->add_option("--seed", seed, "restart sampling seed");

    auto* sobol = app.add_subcommand("sobol", "variance-based sensitivity indices of an emulator");
    sobol->add_option("--model", model_path, "emulator artifact")->required();
    sobol->add_option("--n", n_sobol, "base sample size (power of two)");
    sobol->add_option("--out", out_path, "output directory")->required();
    sobol->add_option("--seed", seed, "digital-shift seed");

    auto* cal = app.add_subcommand("calibrate", "bayesian calibration against observed areas");
    cal->add_option("--observations", obs_path, "CSV with group,day,area_um2")->required();
    cal->add_option("--models", models_dir, "directory with day<k>.json emulators")->required();
    cal->add_option("--out", out_path, "output directory")->required();
    cal->add_option("--chains", chains, "number of chains");
    cal->add_option("--draws", draws_n, "retained draws per chain");
    cal->add_option("--burn-in", burn_in, "adaptation draws per chain");
    cal->add_option("--sigma", sigma_override, "observation noise override (um^2)");
    cal->add_option("--seed", seed, "sampler seed");

    auto* meas = app.add_subcommand("measure", "morphology metrics from a cell table");
    meas->add_option("--cells", cells_path, "cells CSV from simulate")->required();
    meas->add_option("--out", out_path, "output directory")->required();

    auto* cmp = app.add_subcommand("compare", "routed group comparison across scenario files");
    cmp->add_option("--inputs", compare_inputs, "two or more scenario metric CSVs")->required();
    cmp->add_option("--out", out_path, "output directory")->required();
    cmp->add_option("--alpha", alpha, "significance level");
    cmp->add_option("--metrics", compare_metrics, "explicit metric columns to compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads == 0) threads = threads_from_env();
        if (threads < 1) throw InputError("thread count must be positive");
        if (sim->parsed())
            return cmd_simulate(config_path, params_path, out_path, seed,
                                sim_seed->count() > 0, threads);
        if (sweep->parsed())
            return cmd_sweep(config_path, samples, replicates, out_path, seed, threads);
        if (gp->parsed()) return cmd_gp_train(training_path, day, out_path, restarts, seed);
        if (sobol->parsed()) return cmd_sobol(model_path, n_sobol, out_path, seed);
        if (cal->parsed())
            return cmd_calibrate(obs_path, models_dir, out_path, chains, draws_n, burn_in,
                                 sigma_override, seed);
        if (meas->parsed()) return cmd_measure(cells_path, out_path);
        if (cmp->parsed()) return cmd_compare(compare_inputs, out_path, alpha, compare_metrics);
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const ResourceError& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return 4;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
