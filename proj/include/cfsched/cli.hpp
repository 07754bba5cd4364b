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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfsched/config.hpp"
#include "cfsched/simloop.hpp"

namespace cfsched {

inline constexpr const char* kOutputDirEnv = "CFSCHED_OUT_DIR";
inline constexpr const char* kCsvSchema = "cfsched-csv/1";

/// Output directory precedence: flag, then environment, then config file.
std::string resolve_output_dir(const std::optional<std::string>& flag, const char* env_value,
                               const std::string& from_config);

/// Fixed-precision number formatting so CSV bodies are reproducible byte for byte.
std::string fmt_num(double v);

void write_slots_csv(std::ostream& os, const CampaignMetrics& m);
void write_users_csv(std::ostream& os, const CampaignMetrics& m);

struct TraceResult {
    SolverState state;
    int num_rrh = 0;
    int num_users = 0;
};

/// Solver on slot 0 of realization 0 with equal weights.
TraceResult run_trace(const CampaignConfig& cfg);
void write_trace_csv(std::ostream& os, const TraceResult& tr);

struct SweepRow {
    std::string label;
    int tau_p = 0;
    double xi_p = 0.0;
    Scheme scheme = Scheme::Proposed;
    CsiMode mode = CsiMode::Estimated;
    double median_user_se = 0.0;
    double mean_sum_se = 0.0;
    double min_user_se = 0.0;
};

enum class SweepAxis { TauP, Scheme };

std::vector<SweepRow> run_sweep(const CampaignConfig& cfg, SweepAxis axis);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

nlohmann::json metrics_json(const CampaignMetrics& m);

/// Parses argv and runs a subcommand. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cfsched
