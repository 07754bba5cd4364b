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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfsched/cli.hpp"
#include "cfsched/config.hpp"
#include "cfsched/simloop.hpp"
#include "json.hpp"

namespace py = pybind11;
using namespace cfsched;
using nlohmann::json;

namespace {

CampaignConfig campaign_from(const std::string& config_json) {
    const ExperimentConfig e = config_from_json(config_json.empty() ? json::object() : json::parse(config_json));
    e.validate();
    return e.campaign();
}

py::dict realization_dict(const RealizationResult& r) {
    std::vector<Eigen::VectorXd> rates, weights;
    std::vector<int> iterations;
    std::vector<bool> converged;
    for (const auto& s : r.slots) {
        rates.push_back(s.rate);
        weights.push_back(s.weights);
        iterations.push_back(s.solver_iterations);
        converged.push_back(s.solver_converged);
    }
    py::dict d;
    d["index"] = r.index;
    d["seed"] = r.seed;
    d["num_users"] = r.num_users;
    d["num_rrh"] = r.num_rrh;
    d["long_term_se"] = r.long_term;
    d["slot_rates"] = rates;
    d["slot_weights"] = weights;
    d["solver_iterations"] = iterations;
    d["solver_converged"] = converged;
    return d;
}

py::dict run_campaign_py(const std::string& config_json) {
    const CampaignConfig cfg = campaign_from(config_json);
    CampaignMetrics m;
    {
        py::gil_scoped_release release;
        m = run_campaign(cfg);
    }
    py::list reals;
    for (const auto& r : m.realizations) reals.append(realization_dict(r));
    py::dict d;
    d["user_se"] = m.user_se();
    d["median_user_se"] = m.median_user_se();
    d["min_user_se"] = m.min_user_se();
    d["mean_sum_se"] = m.mean_sum_se();
    d["pilot_reuse"] = m.pilot_reuse;
    d["pre_log"] = m.pre_log;
    d["realizations"] = reals;
    return d;
}

py::dict solve_slot_py(const std::string& config_json, int realization, int slot,
                       std::optional<Eigen::VectorXd> weights) {
    const CampaignConfig cfg = campaign_from(config_json);
    if (realization < 0 || realization >= cfg.num_realizations)
        throw ConfigError("realization index out of range");
    const RealizationSetup setup = setup_realization(cfg, realization);
    const ChannelSet ch = slot_channels(cfg, setup, slot);
    const Eigen::VectorXd delta = weights ? *weights : Eigen::VectorXd::Ones(setup.net.num_users());
    SchemeOutput out;
    {
        py::gil_scoped_release release;
        out = run_scheme(cfg, setup.net, ch, delta, slot);
    }
    Eigen::VectorXd trace = Eigen::Map<const Eigen::VectorXd>(out.solver.objective_trace.data(),
                                                              static_cast<Eigen::Index>(out.solver.objective_trace.size()));
    Eigen::MatrixXd rrh_power(static_cast<Eigen::Index>(out.solver.iterations.size()), setup.net.num_rrh());
    for (std::size_t i = 0; i < out.solver.iterations.size(); ++i)
        rrh_power.row(static_cast<Eigen::Index>(i)) = out.solver.iterations[i].power.transpose();
    py::dict d;
    d["beamformers"] = out.beamformers;
    std::vector<std::vector<int>> schedule;
    for (const auto& row : out.schedule.active) schedule.emplace_back(row.begin(), row.end());
    d["schedule"] = schedule;
    d["served"] = setup.net.served;
    d["objective_trace"] = trace;
    d["rrh_power"] = rrh_power;
    d["converged"] = out.solver.converged;
    d["rate"] = actual_rate(setup.net, out.schedule, out.beamformers, ch.truth, cfg.noise_power_w,
                            pre_log(cfg.mode, cfg.tau_d, cfg.tau_p));
    return d;
}

py::dict network_py(const std::string& config_json, int realization) {
    const CampaignConfig cfg = campaign_from(config_json);
    const RealizationSetup setup = setup_realization(cfg, realization);
    Eigen::MatrixXd users(setup.net.num_users(), 2), rrhs(setup.net.num_rrh(), 2);
    for (int u = 0; u < setup.net.num_users(); ++u) users.row(u) << setup.net.user_positions[u].x, setup.net.user_positions[u].y;
    for (int r = 0; r < setup.net.num_rrh(); ++r) rrhs.row(r) << setup.net.rrh_positions[r].x, setup.net.rrh_positions[r].y;
    py::dict d;
    d["user_positions"] = users;
    d["rrh_positions"] = rrhs;
    d["large_scale_gain"] = setup.net.large_scale_gain;
    d["clusters"] = setup.net.clusters;
    d["served"] = setup.net.served;
    d["pilot_index"] = setup.pilots.pilot_index;
    d["copilot_sets"] = setup.pilots.copilot_sets;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "User scheduling and robust beamforming for user-centric cell-free MIMO";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_AssertionError);

    m.def("default_config", [] { return to_json(config_from_json(json::object())).dump(); },
          "Default experiment configuration as a JSON string.");
    m.def("normalize_config", [](const std::string& s) { return to_json(config_from_json(json::parse(s))).dump(); },
          py::arg("config_json"), "Validate a JSON config and fill in defaults.");
    m.def("network", &network_py, py::arg("config_json"), py::arg("realization") = 0,
          "Geometry, large-scale gains, clusters and pilots of one realization.");
    m.def("solve_slot", &solve_slot_py, py::arg("config_json"), py::arg("realization") = 0, py::arg("slot") = 0,
          py::arg("weights") = std::nullopt,
          "Run the configured scheme on one slot and return beamformers, schedule and rates.");
    m.def("run_campaign", &run_campaign_py, py::arg("config_json"), "Multi-slot proportional-fair campaign.");
    m.def("noise_power", &noise_power, py::arg("density_dbm_per_hz"), py::arg("noise_figure_db"),
          py::arg("bandwidth_hz"));
    m.def("pre_log", [](const std::string& mode, int tau_d, int tau_p) { return pre_log(parse_mode(mode), tau_d, tau_p); },
          py::arg("mode"), py::arg("tau_d"), py::arg("tau_p"));
    m.def("pilot_reuse_factor", &pilot_reuse_factor, py::arg("tau_p"), py::arg("users_per_km2"));
    m.def("schemes", [] {
        std::vector<std::string> ids;
        for (Scheme s : all_schemes()) ids.push_back(to_string(s));
        return ids;
    });
}
