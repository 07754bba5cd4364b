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

#include <string>
#include <string_view>
#include <vector>

#include "cfsched/channel.hpp"
#include "cfsched/netgen.hpp"
#include "cfsched/solver.hpp"

namespace cfsched {

enum class Scheme {
    Proposed,             // "proposed"
    ZfOptimizedSchedule,  // "ZF-optSched"
    ZfRoundRobin,         // "ZF-RR"
    ConjugateRoundRobin,  // "conjugate-RR"
};

std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view id);  // ConfigError on unknown ids
std::vector<Scheme> all_schemes();

struct BaselineConfig {
    Scheme scheme = Scheme::Proposed;
    bool equal_power_split = true;
};

/// Per-RRH circular pointer over E_r (ascending user index at slot 0), advancing by
/// the number served each slot.
Schedule round_robin(const std::vector<std::vector<int>>& served, int max_per_rrh, int slot_index);

/// Pseudo-inverse columns of each RRH's stacked scheduled estimates, every column
/// normalised to p / |S_r|. A rank-deficient stack drops its weakest user and retries.
Beamformers zf_beamformers(const NetworkRealization& net, const Schedule& schedule, const ChannelMatrices& estimates,
                           double power_budget);

/// sqrt(p / |S_r|) h_hat / ||h_hat||; links with a zero estimate are skipped.
Beamformers conjugate_beamformers(const NetworkRealization& net, const Schedule& schedule,
                                  const ChannelMatrices& estimates, double power_budget);

/// ZF on the schedule chosen by the proposed solver.
Beamformers zf_with_optimized_schedule(const NetworkRealization& net, const Schedule& proposed_schedule,
                                       const ChannelMatrices& estimates, double power_budget);

}  // namespace cfsched
