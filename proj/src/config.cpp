#include "spheroid/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spheroid/error.hpp"

namespace spheroid {

using nlohmann::json;

namespace {

// Wraps one JSON object and tracks which keys were read, so that typos in
// config files fail loudly instead of being silently ignored.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw InputError("config section '" + name_ + "' must be a JSON object");
    }

    double num(const char* key, double fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) throw InputError("config key '" + name_ + "." + key + "' must be a number");
        return v.get<double>();
    }

    std::uint64_t uint(const char* key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned()) {
            throw InputError("config key '" + name_ + "." + key + "' must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::optional<double> opt_num(const char* key) {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
        const json& v = j_.at(key);
        if (!v.is_number()) throw InputError("config key '" + name_ + "." + key + "' must be a number");
        return v.get<double>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw InputError("unknown config key '" + name_ + "." + it.key() + "'");
            }
        }
    }

private:
    json j_;  // owned copy: the source object is a temporary for absent sections
    std::string name_;
    std::set<std::string> seen_;
};

json section_or_empty(const json& root, const char* key, std::set<std::string>& seen) {
    seen.insert(key);
    if (!root.contains(key)) return json::object();
    return root.at(key);
}

}  // namespace

double SimConfig::eta_pa_s() const {
    if (eta_override_pa_s) return *eta_override_pa_s;
    return eta_for_density(density_mg_ml);
}

void SimConfig::validate() const {
    if (duration_min < 0.0) throw InputError("simulation.duration_min must be non-negative");
    if (dt_min <= 0.0) throw InputError("simulation.dt_min must be positive");
    if (phenotype_dt_min < dt_min) {
        throw InputError("simulation.phenotype_dt_min must be at least simulation.dt_min");
    }
    if (phen.k_prolif * phenotype_dt_min >= 0.1) {
        throw InputError("division probability k_prolif * phenotype_dt_min must stay below 0.1");
    }
    if (snapshot_interval_min <= 0.0) throw InputError("simulation.snapshot_interval_min must be positive");
    if (max_cells == 0) throw InputError("simulation.max_cells must be positive");
    if (n_initial == 0) throw InputError("initial.n_cells must be positive");
    if (placement_radius_um < 0.0) throw InputError("initial.placement_radius_um must be non-negative");
    if (domain_half_extent_um <= 0.0) throw InputError("domain.half_extent_um must be positive");
    if (eta_pa_s() <= 0.0) throw InputError("mechanics.eta_pa_s must be positive");
    if (locomotive_scale < 0.0 || locomotive_scale > 1.0) {
        throw InputError("mechanics.locomotive_scale must lie in [0, 1]");
    }
    if (locomotive_gain < 0.0) throw InputError("mechanics.locomotive_gain must be non-negative");
    if (nad_total <= 0.0) throw InputError("metabolism.nad_total must be positive");
    if (env.glucose_clamp < 0.0) throw InputError("metabolism.glucose_clamp must be non-negative");
    if (env.oxygen_clamp < 0.0) throw InputError("metabolism.oxygen_clamp must be non-negative");
    if (env.substep <= 0.0) throw InputError("metabolism.substep_min must be positive");
    mech.validate();
    met.validate();
    phen.validate();
}

SimConfig config_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw InputError("config root must be a JSON object");

    SimConfig c;
    std::set<std::string> top_seen;

    {
        Section s(section_or_empty(root, "simulation", top_seen), "simulation");
        c.seed = s.uint("seed", c.seed);
        c.duration_min = s.num("duration_min", c.duration_min);
        c.dt_min = s.num("dt_min", c.dt_min);
        c.phenotype_dt_min = s.num("phenotype_dt_min", c.phenotype_dt_min);
        c.snapshot_interval_min = s.num("snapshot_interval_min", c.snapshot_interval_min);
        c.max_cells = s.uint("max_cells", c.max_cells);
        s.finish();
    }
    {
        Section s(section_or_empty(root, "initial", top_seen), "initial");
        c.n_initial = s.uint("n_cells", c.n_initial);
        c.placement_radius_um = s.num("placement_radius_um", c.placement_radius_um);
        s.finish();
    }
    {
        Section s(section_or_empty(root, "domain", top_seen), "domain");
        c.domain_half_extent_um = s.num("half_extent_um", c.domain_half_extent_um);
        s.finish();
    }
    {
        Section s(section_or_empty(root, "mechanics", top_seen), "mechanics");
        c.density_mg_ml = s.num("density_mg_ml", c.density_mg_ml);
        c.eta_override_pa_s = s.opt_num("eta_pa_s");
        c.mech.c_cca = s.num("c_cca", c.mech.c_cca);
        c.mech.c_ccr = s.num("c_ccr", c.mech.c_ccr);
        c.mech.radius = s.num("radius_um", c.mech.radius);
        c.mech.adhesion_radius = s.num("adhesion_radius_um", c.mech.adhesion_radius);
        c.locomotive_scale = s.num("locomotive_scale", c.locomotive_scale);
        c.locomotive_gain = s.num("locomotive_gain", c.locomotive_gain);
        s.finish();
    }
    {
        Section s(section_or_empty(root, "metabolism", top_seen), "metabolism");
        c.met.k_glu = s.num("k_glu", c.met.k_glu);
        c.met.k_aer = s.num("k_aer", c.met.k_aer);
        c.met.k_ana = s.num("k_ana", c.met.k_ana);
        c.met.k_ene = s.num("k_ene", c.met.k_ene);
        c.env.glucose_clamp = s.num("glucose_clamp", c.env.glucose_clamp);
        c.env.oxygen_clamp = s.num("oxygen_clamp", c.env.oxygen_clamp);
        c.env.substep = s.num("substep_min", c.env.substep);
        c.nad_total = s.num("nad_total", c.nad_total);
        s.finish();
    }
    {
        Section s(section_or_empty(root, "phenotype", top_seen), "phenotype");
        c.phen.k_prolif = s.num("k_prolif", c.phen.k_prolif);
        c.phen.atp_prolif = s.num("atp_prolif", c.phen.atp_prolif);
        c.phen.atp_death = s.num("atp_death", c.phen.atp_death);
        s.finish();
    }
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!top_seen.count(it.key())) throw InputError("unknown config section '" + it.key() + "'");
    }

    c.validate();
    return c;
}

std::string config_to_json_text(const SimConfig& c) {
    json root;
    root["simulation"] = {
        {"seed", c.seed},
        {"duration_min", c.duration_min},
        {"dt_min", c.dt_min},
        {"phenotype_dt_min", c.phenotype_dt_min},
        {"snapshot_interval_min", c.snapshot_interval_min},
        {"max_cells", c.max_cells},
    };
    root["initial"] = {
        {"n_cells", c.n_initial},
        {"placement_radius_um", c.placement_radius_um},
    };
    root["domain"] = {
        {"half_extent_um", c.domain_half_extent_um},
    };
    json mech = {
        {"density_mg_ml", c.density_mg_ml},
        {"c_cca", c.mech.c_cca},
        {"c_ccr", c.mech.c_ccr},
        {"radius_um", c.mech.radius},
        {"adhesion_radius_um", c.mech.adhesion_radius},
        {"locomotive_scale", c.locomotive_scale},
        {"locomotive_gain", c.locomotive_gain},
    };
    if (c.eta_override_pa_s) mech["eta_pa_s"] = *c.eta_override_pa_s;
    root["mechanics"] = std::move(mech);
    root["metabolism"] = {
        {"k_glu", c.met.k_glu},
        {"k_aer", c.met.k_aer},
        {"k_ana", c.met.k_ana},
        {"k_ene", c.met.k_ene},
        {"glucose_clamp", c.env.glucose_clamp},
        {"oxygen_clamp", c.env.oxygen_clamp},
        {"substep_min", c.env.substep},
        {"nad_total", c.nad_total},
    };
    root["phenotype"] = {
        {"k_prolif", c.phen.k_prolif},
        {"atp_prolif", c.phen.atp_prolif},
        {"atp_death", c.phen.atp_death},
    };
    return root.dump(2) + "\n";
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

void save_config(const SimConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write config file: " + path);
    out << config_to_json_text(c);
    if (!out) throw InputError("failed writing config file: " + path);
}

}  // namespace spheroid
