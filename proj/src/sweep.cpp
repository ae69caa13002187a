// Latin-hypercube sweep over the simulator.
#include "spheroid/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "spheroid/csv.hpp"
#include "spheroid/design.hpp"
#include "spheroid/error.hpp"
#include "spheroid/measure.hpp"
#include "spheroid/rng.hpp"
#include "spheroid/simulation.hpp"

namespace spheroid {

namespace {

std::vector<std::string> sweep_header() {
    std::vector<std::string> h{"sample"};
    for (const auto& name : ParameterVector::names()) h.push_back(name);
    h.push_back("day");
    h.push_back("area_um2");
    h.push_back("status");
    return h;
}

double largest_area(const MorphologyReport& report) {
    double best = 0.0;
    for (const auto& s : report.spheroids) best = std::max(best, s.area_um2);
    return best;
}

}  // namespace

SimConfig with_parameters(const SimConfig& base, const ParameterVector& theta) {
    SimConfig cfg = base;
    cfg.met.k_glu = theta.k_glu;
    cfg.met.k_aer = theta.k_aer;
    cfg.met.k_ana = theta.k_ana;
    cfg.met.k_ene = theta.k_ene;
    cfg.phen.k_prolif = theta.k_prolif;
    cfg.phen.atp_prolif = theta.atp_prolif;
    cfg.phen.atp_death = theta.atp_death;
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t sample, std::uint64_t replicate) {
    std::uint64_t x = base_seed ^ (sample * 0x100000001B3ull) ^ (replicate * 0x9E3779B97F4A7C15ull);
    // splitmix-style finalization so nearby indices decorrelate
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::vector<DayArea> day_areas_for(const SimConfig& cfg, std::size_t replicates,
                                   std::uint64_t sample_index, std::uint64_t base_seed,
                                   int threads) {
    if (replicates == 0) throw InputError("at least one replicate per sample");
    std::vector<DayArea> acc;
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(base_seed, sample_index, rep);
        Simulation sim(run_cfg, threads);
        std::vector<DayArea> this_rep;
        sim.initialize();
        sim.run([&](const Snapshot& snap) {
            double day_f = snap.time_min / 1440.0;
            double rounded = std::round(day_f);
            if (std::fabs(day_f - rounded) > 1e-9) return;  // keep whole days only
            MorphologyReport report = measure(snap.cells);
            this_rep.push_back({static_cast<int>(rounded), largest_area(report)});
        });
        if (acc.empty()) {
            acc = std::move(this_rep);
        } else {
            if (this_rep.size() != acc.size())
                throw NumericalError("replicates disagree on snapshot days");
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i].area_um2 += this_rep[i].area_um2;
        }
    }
    for (auto& d : acc) d.area_um2 /= static_cast<double>(replicates);
    return acc;
}

SweepOutcome run_sweep(const SimConfig& base, const std::vector<Bounds>& box,
                       const SweepOptions& opts, const std::string& csv_path) {
    if (opts.samples < 2) throw InputError("a sweep needs at least 2 samples");
    if (box.size() != ParameterVector::kDim)
        throw InputError("sweep box must cover all seven parameters");

    // resume: samples already in the checkpoint are not recomputed. The
    // design deck depends on (samples, seed), so resuming under different
    // options would silently mix two designs; the sidecar guards against it.
    std::string meta_path = csv_path + ".meta.json";
    nlohmann::json meta = {{"samples", opts.samples},
                           {"replicates", opts.replicates},
                           {"seed", opts.seed}};
    std::set<std::uint64_t> done;
    bool existing = std::filesystem::exists(csv_path);
    if (existing) {
        std::ifstream meta_in(meta_path);
        if (!meta_in)
            throw InputError("checkpoint '" + csv_path + "' lacks its sidecar '" + meta_path +
                             "'");
        nlohmann::json old_meta;
        try {
            meta_in >> old_meta;
        } catch (const nlohmann::json::exception& e) {
            throw InputError("malformed sweep sidecar '" + meta_path + "': " + e.what());
        }
        if (old_meta != meta)
            throw InputError("cannot resume '" + csv_path +
                             "': sweep options differ from the checkpointed run");
        CsvTable old = read_csv(csv_path);
        if (old.header != sweep_header())
            throw InputError("checkpoint '" + csv_path + "' has a different column layout");
        auto col = old.column("sample");
        for (const auto& row : old.rows) done.insert(parse_u64(row[col], csv_path));
        // the last sample may have been cut off mid-write; recompute it
        // (runs are deterministic, so a complete one rewrites identically)
        if (!old.rows.empty()) {
            std::uint64_t last = parse_u64(old.rows.back()[col], csv_path);
            done.erase(last);
            CsvWriter rewrite(csv_path, sweep_header());
            for (const auto& row : old.rows)
                if (parse_u64(row[col], csv_path) != last) rewrite.write_strings(row);
            rewrite.flush();
        }
    } else {
        std::ofstream meta_out(meta_path);
        if (!meta_out) throw InputError("cannot write sweep sidecar '" + meta_path + "'");
        meta_out << meta.dump(1) << '\n';
    }

    // the design is a pure function of the seed, so resumed runs see the
    // same sample set
    RngStream stream(opts.seed, 0xD051);
    auto draws = stream.draws(rng_purpose::kSampling, 0);
    auto unit = latin_hypercube(opts.samples, ParameterVector::kDim, draws);

    std::ofstream out;
    if (existing) {
        out.open(csv_path, std::ios::app);
        if (!out) throw InputError("cannot append to '" + csv_path + "'");
    } else {
        CsvWriter header_writer(csv_path, sweep_header());
        header_writer.flush();
        out.open(csv_path, std::ios::app);
        if (!out) throw InputError("cannot append to '" + csv_path + "'");
    }

    SweepOutcome outcome;
    for (std::size_t s = 0; s < opts.samples; ++s) {
        if (done.count(s)) {
            ++outcome.skipped;
            continue;
        }
        auto theta_arr = scale_to_box(unit[s], box);
        std::array<double, ParameterVector::kDim> arr{};
        std::copy(theta_arr.begin(), theta_arr.end(), arr.begin());
        ParameterVector theta = ParameterVector::from_array(arr);
        SimConfig cfg = with_parameters(base, theta);

        auto write_theta = [&](std::ostream& o) {
            o << s;
            for (double v : theta.to_array()) o << ',' << format_double(v);
        };
        try {
            auto days = day_areas_for(cfg, opts.replicates, s, opts.seed, opts.threads);
            for (const auto& d : days) {
                write_theta(out);
                out << ',' << d.day << ',' << format_double(d.area_um2) << ",ok\n";
            }
            ++outcome.completed;
        } catch (const std::exception& e) {
            write_theta(out);
            std::string reason = e.what();
            std::replace(reason.begin(), reason.end(), ',', ';');
            std::replace(reason.begin(), reason.end(), '\n', ' ');
            out << ",-1,0,failed: " << reason << "\n";
            ++outcome.failed;
        }
        out.flush();  // checkpoint after every sample
    }
    return outcome;
}

}  // namespace spheroid
