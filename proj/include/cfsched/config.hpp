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

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "cfsched/simloop.hpp"
#include "cfsched/units.hpp"

namespace cfsched {

struct NoiseConfig {
    double density_dbm_per_hz = -174.0;
    double figure_db = 8.0;
    double bandwidth_hz = 180e3;
};

/// Everything a run needs, in the units a config file uses (dBm for powers).
struct ExperimentConfig {
    LayoutConfig layout;
    CsiMode mode = CsiMode::Estimated;
    Scheme scheme = Scheme::Proposed;
    int tau_d = 200;
    int tau_p = 32;
    Dbm power{30.0};
    Dbm pilot_power{20.0};
    NoiseConfig noise;
    double eta = 0.2;
    double epsilon_factor = 0.9;         // epsilon = factor * p / M when epsilon_w is unset
    std::optional<double> epsilon_w;
    double tol_converge = 1e-5;
    int k_stable = 3;
    int max_iterations = 200;
    double schedule_threshold = 1e-4;
    int num_slots = 100;
    int window = 50;
    int num_realizations = 1;
    std::uint64_t seed = 1;
    int workers = 1;
    bool pf_weights = true;
    std::string output_dir = "out";

    double epsilon() const;
    void validate() const;
    CampaignConfig campaign() const;
};

/// Defaults for every omitted key; unknown keys and invalid values raise ConfigError
/// naming the key path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace cfsched
