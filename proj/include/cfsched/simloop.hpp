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
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfsched/baselines.hpp"
#include "cfsched/channel.hpp"
#include "cfsched/netgen.hpp"
#include "cfsched/solver.hpp"

namespace cfsched {

enum class CsiMode { Perfect, Estimated };  // "PI", "PEAR"

std::string to_string(CsiMode m);
CsiMode parse_mode(std::string_view id);

/// Fraction of the coherence block left for data; 1 under perfect CSI.
double pre_log(CsiMode mode, int tau_d, int tau_p);

/// Rate per user on the true channels with only scheduled links transmitting
/// (log2, times pre_log). Users with no scheduled link get 0.
Eigen::VectorXd actual_rate(const NetworkRealization& net, const Schedule& schedule, const Beamformers& w,
                            const ChannelMatrices& truth, double noise_power, double prelog);

/// Rate the CU predicts from its estimates, the estimation-error terms inflating the
/// interference (log2, times pre_log).
Eigen::VectorXd effective_rate(const NetworkRealization& net, const Schedule& schedule, const Beamformers& w,
                               const ChannelSet& ch, double prelog);

inline constexpr double kAverageRateFloor = 1e-3;  // bits/s/Hz

struct PfState {
    Eigen::VectorXd average;  // exponentially averaged rate
    Eigen::VectorXd weights;  // 1 / average
};

PfState initial_pf(int num_users);

/// average <- eta * rate + (1 - eta) * average, clamped at kAverageRateFloor; weights = 1 / average.
PfState update_pf(const PfState& prev, const Eigen::VectorXd& rate, double eta);

/// tau_p / user density (per km^2).
double pilot_reuse_factor(int tau_p, double users_per_km2);

struct CampaignConfig {
    LayoutConfig layout;
    SolverConfig solver;
    Scheme scheme = Scheme::Proposed;
    CsiMode mode = CsiMode::Estimated;
    int tau_d = 200;
    int tau_p = 32;
    double pilot_power_w = 0.1;
    double noise_power_w = 0.0;
    double eta = 0.2;
    int num_slots = 100;
    int window = 50;
    int num_realizations = 1;
    std::uint64_t seed = 1;
    int workers = 1;
    bool pf_weights = true;  // false: delta = 1 every slot
    bool keep_traces = false;

    void validate() const;
};

struct SlotLedger {
    int slot = 0;
    Eigen::VectorXd rate;     // R_u, bits/s/Hz
    Eigen::VectorXd average;  // after the update
    Eigen::VectorXd weights;  // used for this slot's optimisation
    std::vector<char> scheduled;  // per user: any serving RRH active
    int max_rrh_load = 0;         // largest number of users scheduled on one RRH
    double sum_rate = 0.0;
    int solver_iterations = 0;
    bool solver_converged = true;
};

struct RealizationResult {
    int index = 0;
    std::uint64_t seed = 0;
    int num_users = 0;
    int num_rrh = 0;
    std::vector<SlotLedger> slots;
    Eigen::VectorXd long_term;  // mean rate over the last window
    std::vector<std::vector<double>> traces;  // objective trace per slot, if kept
};

struct CampaignMetrics {
    std::vector<RealizationResult> realizations;
    double pilot_reuse = 0.0;
    double pre_log = 1.0;

    /// Long-term SE of every user in every realization, realization-major.
    std::vector<double> user_se() const;
    double median_user_se() const;
    double min_user_se() const;
    /// Mean over realizations of the window-averaged network sum SE.
    double mean_sum_se() const;
    /// Window-averaged network sum SE of one realization.
    double sum_se(int realization) const;
};

/// Master seed of realization k.
std::uint64_t realization_seed(std::uint64_t master, int k);

/// Geometry, pilots and per-slot channel state for realization k, shared by every scheme.
struct RealizationSetup {
    NetworkRealization net;
    PilotAssignment pilots;
    std::uint64_t seed = 0;
};

RealizationSetup setup_realization(const CampaignConfig& cfg, int k);

/// Fresh fading for slot t and, under estimated CSI, the pilot phase.
ChannelSet slot_channels(const CampaignConfig& cfg, const RealizationSetup& setup, int t);

struct SchemeOutput {
    Schedule schedule;
    Beamformers beamformers;
    SolverState solver;  // empty unless the scheme runs the solver
};

SchemeOutput run_scheme(const CampaignConfig& cfg, const NetworkRealization& net, const ChannelSet& ch,
                        const Eigen::VectorXd& weights, int slot);

RealizationResult run_realization(const CampaignConfig& cfg, int k);

CampaignMetrics run_campaign(const CampaignConfig& cfg);

}  // namespace cfsched
