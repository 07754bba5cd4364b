// SPDX-License-Identifier: Apache-2.0
//
// cfsched: user scheduling and robust beamforming for user-centric cell-free MIMO
// Copyright (C) 2026 The cfsched authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfsched/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cfsched {

using nlohmann::json;

double ExperimentConfig::epsilon() const {
    if (epsilon_w) return *epsilon_w;
    return epsilon_factor * to_watts(power) / static_cast<double>(layout.antennas_per_rrh);
}

void ExperimentConfig::validate() const { campaign().validate(); }

CampaignConfig ExperimentConfig::campaign() const {
    CampaignConfig c;
    c.layout = layout;
    c.layout.seed = seed;
    c.solver.power_budget = to_watts(power);
    c.solver.epsilon = epsilon();
    c.solver.tol_converge = tol_converge;
    c.solver.k_stable = k_stable;
    c.solver.max_iterations = max_iterations;
    c.solver.schedule_threshold = schedule_threshold;
    c.scheme = scheme;
    c.mode = mode;
    c.tau_d = tau_d;
    c.tau_p = tau_p;
    c.pilot_power_w = to_watts(pilot_power);
    if (!(noise.bandwidth_hz > 0.0)) throw ConfigError("noise.bandwidth_hz: must be positive");
    c.noise_power_w = noise_power(noise.density_dbm_per_hz, noise.figure_db, noise.bandwidth_hz);
    c.eta = eta;
    c.num_slots = num_slots;
    c.window = window;
    c.num_realizations = num_realizations;
    c.seed = seed;
    c.workers = workers;
    c.pf_weights = pf_weights;
    return c;
}

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + "wrong type");
        }
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(out)) throw ConfigError(where(key) + "must be finite");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) { seen_.insert(key); return j_.at(key); }
    std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(child(it.key().c_str()) + ": unknown key");
    }

private:
    std::string where(const char* key) const {
        const std::string k = child(key);
        return (k.empty() ? std::string("config") : k) + ": ";
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_layout(const json& j, LayoutConfig& l) {
    Reader r(j, "layout");
    r.get("num_cells", l.num_cells);
    r.get("rrh_per_cell", l.rrh_per_cell);
    r.get("antennas_per_rrh", l.antennas_per_rrh);
    r.get("cell_inner_radius_m", l.cell_inner_radius_m);
    r.get("user_density_per_km2", l.user_density_per_km2);
    r.get("exclusion_radius_m", l.exclusion_radius_m);
    r.get("shadowing_sigma_db", l.shadowing_sigma_db);
    r.get("cluster_threshold_db", l.cluster_threshold_db);
    if (r.has("fixed_user_count")) {
        const json& v = r.at("fixed_user_count");
        if (v.is_null()) {
            l.fixed_user_count.reset();
        } else if (v.is_number_integer()) {
            l.fixed_user_count = v.get<int>();
        } else {
            throw ConfigError("layout.fixed_user_count: wrong type");
        }
    }
    r.finish();
}

void read_noise(const json& j, NoiseConfig& n) {
    Reader r(j, "noise");
    r.get("density_dbm_per_hz", n.density_dbm_per_hz);
    r.get("figure_db", n.figure_db);
    r.get("bandwidth_hz", n.bandwidth_hz);
    r.finish();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    const json empty = json::object();
    Reader r(j.is_null() ? empty : j, "");
    if (r.has("layout")) read_layout(r.at("layout"), c.layout);
    if (r.has("noise")) read_noise(r.at("noise"), c.noise);

    std::string mode = to_string(c.mode);
    std::string scheme = to_string(c.scheme);
    r.get("mode", mode);
    r.get("scheme", scheme);
    c.mode = parse_mode(mode);
    c.scheme = parse_scheme(scheme);
    r.get("tau_d", c.tau_d);
    r.get("tau_p", c.tau_p);
    r.get("power_dbm", c.power.value);
    r.get("pilot_power_dbm", c.pilot_power.value);
    r.get("eta", c.eta);
    r.get("epsilon_factor", c.epsilon_factor);
    if (r.has("epsilon_w")) {
        double e = 0.0;
        r.get("epsilon_w", e);
        c.epsilon_w = e;
    }
    r.get("tol_converge", c.tol_converge);
    r.get("k_stable", c.k_stable);
    r.get("max_iterations", c.max_iterations);
    r.get("schedule_threshold", c.schedule_threshold);
    r.get("num_slots", c.num_slots);
    r.get("window", c.window);
    r.get("num_realizations", c.num_realizations);
    r.get("seed", c.seed);
    r.get("workers", c.workers);
    r.get("pf_weights", c.pf_weights);
    r.get("output_dir", c.output_dir);
    r.finish();

    if (c.k_stable < 1) throw ConfigError("k_stable: must be at least 1");
    if (c.max_iterations < 1) throw ConfigError("max_iterations: must be at least 1");
    if (!(c.tol_converge > 0.0)) throw ConfigError("tol_converge: must be positive");
    if (!(c.epsilon_factor > 0.0)) throw ConfigError("epsilon_factor: must be positive");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config_from_json(json::object());
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["layout"] = {
        {"num_cells", c.layout.num_cells},
        {"rrh_per_cell", c.layout.rrh_per_cell},
        {"antennas_per_rrh", c.layout.antennas_per_rrh},
        {"cell_inner_radius_m", c.layout.cell_inner_radius_m},
        {"user_density_per_km2", c.layout.user_density_per_km2},
        {"exclusion_radius_m", c.layout.exclusion_radius_m},
        {"shadowing_sigma_db", c.layout.shadowing_sigma_db},
        {"cluster_threshold_db", c.layout.cluster_threshold_db},
        {"fixed_user_count", c.layout.fixed_user_count ? json(*c.layout.fixed_user_count) : json(nullptr)},
    };
    j["noise"] = {
        {"density_dbm_per_hz", c.noise.density_dbm_per_hz},
        {"figure_db", c.noise.figure_db},
        {"bandwidth_hz", c.noise.bandwidth_hz},
    };
    j["mode"] = to_string(c.mode);
    j["scheme"] = to_string(c.scheme);
    j["tau_d"] = c.tau_d;
    j["tau_p"] = c.tau_p;
    j["power_dbm"] = c.power.value;
    j["pilot_power_dbm"] = c.pilot_power.value;
    j["eta"] = c.eta;
    j["epsilon_factor"] = c.epsilon_factor;
    if (c.epsilon_w) j["epsilon_w"] = *c.epsilon_w;
    j["tol_converge"] = c.tol_converge;
    j["k_stable"] = c.k_stable;
    j["max_iterations"] = c.max_iterations;
    j["schedule_threshold"] = c.schedule_threshold;
    j["num_slots"] = c.num_slots;
    j["window"] = c.window;
    j["num_realizations"] = c.num_realizations;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["pf_weights"] = c.pf_weights;
    j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace cfsched
