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

#include "cfsched/simloop.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace cfsched {

std::string to_string(CsiMode m) { return m == CsiMode::Perfect ? "PI" : "PEAR"; }

CsiMode parse_mode(std::string_view id) {
    if (id == "PI") return CsiMode::Perfect;
    if (id == "PEAR") return CsiMode::Estimated;
    throw ConfigError("mode: unknown identifier '" + std::string(id) + "' (expected PI or PEAR)");
}

double pre_log(CsiMode mode, int tau_d, int tau_p) {
    if (tau_d <= 0 || tau_p < 0 || tau_p >= tau_d) throw ConfigError("tau_p: must satisfy 0 <= tau_p < tau_d");
    if (mode == CsiMode::Perfect) return 1.0;
    return static_cast<double>(tau_d - tau_p) / static_cast<double>(tau_d);
}

Eigen::VectorXd actual_rate(const NetworkRealization& net, const Schedule& schedule, const Beamformers& w,
                            const ChannelMatrices& truth, double noise_power, double prelog) {
    const int nu = net.num_users();
    Eigen::VectorXd signal = Eigen::VectorXd::Zero(nu);
    Eigen::VectorXd received = Eigen::VectorXd::Zero(nu);
    std::vector<char> served_any(nu, 0);
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto& served = net.served[r];
        for (std::size_t j = 0; j < served.size(); ++j) {
            if (!schedule.active[r][j]) continue;
            served_any[served[j]] = 1;
            // |h_{r,u}^H w_{r,j}|^2 for every receiver u
            const Eigen::VectorXcd resp = truth[r].adjoint() * w[r].col(j);
            received += resp.cwiseAbs2();
            signal(served[j]) += std::norm(resp(served[j]));
        }
    }
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(nu);
    for (int u = 0; u < nu; ++u) {
        if (!served_any[u]) continue;
        const double interference = std::max(0.0, received(u) - signal(u)) + noise_power;
        rate(u) = prelog * std::log2(1.0 + signal(u) / interference);
    }
    return rate;
}

Eigen::VectorXd effective_rate(const NetworkRealization& net, const Schedule& schedule, const Beamformers& w,
                               const ChannelSet& ch, double prelog) {
    const LinkBudget lb = link_budget(net, ch, apply_schedule(w, schedule));
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(net.num_users());
    for (int u = 0; u < net.num_users(); ++u)
        if (lb.signal(u) > 0.0) rate(u) = prelog * std::log2(1.0 + lb.signal(u) / lb.interference(u));
    return rate;
}

PfState initial_pf(int num_users) {
    return {Eigen::VectorXd::Constant(num_users, kAverageRateFloor),
            Eigen::VectorXd::Constant(num_users, 1.0 / kAverageRateFloor)};
}

PfState update_pf(const PfState& prev, const Eigen::VectorXd& rate, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ContractError("update_pf: eta must lie in [0, 1]");
    PfState next;
    next.average = (eta * rate + (1.0 - eta) * prev.average).cwiseMax(kAverageRateFloor);
    next.weights = next.average.cwiseInverse();
    return next;
}

double pilot_reuse_factor(int tau_p, double users_per_km2) {
    if (!(users_per_km2 > 0.0)) throw ContractError("pilot_reuse_factor: density must be positive");
    return static_cast<double>(tau_p) / users_per_km2;
}

void CampaignConfig::validate() const {
    layout.validate();
    if (tau_p < 1) throw ConfigError("tau_p: must be at least 1");
    if (tau_p >= tau_d) throw ConfigError("tau_p: must be smaller than tau_d");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta: must lie in [0, 1]");
    if (num_slots < 1) throw ConfigError("num_slots: must be at least 1");
    if (window < 1 || window > num_slots) throw ConfigError("window: must lie in [1, num_slots]");
    if (num_realizations < 1) throw ConfigError("num_realizations: must be at least 1");
    if (workers < 1) throw ConfigError("workers: must be at least 1");
    if (!(solver.power_budget > 0.0) || !std::isfinite(solver.power_budget))
        throw ConfigError("power_dbm: must give a finite positive power");
    if (!(pilot_power_w > 0.0) || !std::isfinite(pilot_power_w))
        throw ConfigError("pilot_power_dbm: must give a finite positive power");
    if (!(noise_power_w > 0.0)) throw ConfigError("noise: power must be positive");
    if (!(solver.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
}

std::vector<double> CampaignMetrics::user_se() const {
    std::vector<double> out;
    for (const auto& r : realizations) out.insert(out.end(), r.long_term.data(), r.long_term.data() + r.long_term.size());
    return out;
}

double CampaignMetrics::median_user_se() const {
    std::vector<double> v = user_se();
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double CampaignMetrics::min_user_se() const {
    const std::vector<double> v = user_se();
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

double CampaignMetrics::sum_se(int realization) const {
    const auto& r = realizations.at(realization);
    return r.long_term.sum();
}

double CampaignMetrics::mean_sum_se() const {
    if (realizations.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < realizations.size(); ++k) s += sum_se(static_cast<int>(k));
    return s / static_cast<double>(realizations.size());
}

std::uint64_t realization_seed(std::uint64_t master, int k) {
    Rng rng = derive_stream(master, {0x5245414cULL, static_cast<std::uint64_t>(k)});
    return rng();
}

RealizationSetup setup_realization(const CampaignConfig& cfg, int k) {
    RealizationSetup s;
    s.seed = realization_seed(cfg.seed, k);
    LayoutConfig layout = cfg.layout;
    layout.seed = s.seed;
    s.net = generate_network(layout);
    const HexLayout hex(layout);
    const auto groups = hac_group(s.net.user_positions, cfg.tau_p, layout.num_cells > 1 ? &hex : nullptr);
    Rng prng = derive_stream(s.seed, {static_cast<std::uint64_t>(StreamTag::Pilots)});
    s.pilots = assign_pilots(groups, s.net.num_users(), cfg.tau_p, prng);
    return s;
}

ChannelSet slot_channels(const CampaignConfig& cfg, const RealizationSetup& setup, int t) {
    Rng fading = derive_stream(setup.seed, {static_cast<std::uint64_t>(StreamTag::Fading), static_cast<std::uint64_t>(t)});
    ChannelMatrices truth = draw_true_channels(setup.net, fading);
    if (cfg.mode == CsiMode::Perfect) return perfect_csi(setup.net, std::move(truth), cfg.noise_power_w);
    Rng noise =
        derive_stream(setup.seed, {static_cast<std::uint64_t>(StreamTag::PilotNoise), static_cast<std::uint64_t>(t)});
    return estimated_csi(setup.net, setup.pilots, std::move(truth), cfg.pilot_power_w, cfg.noise_power_w, noise);
}

SchemeOutput run_scheme(const CampaignConfig& cfg, const NetworkRealization& net, const ChannelSet& ch,
                        const Eigen::VectorXd& weights, int slot) {
    SchemeOutput out;
    const double p = cfg.solver.power_budget;
    switch (cfg.scheme) {
        case Scheme::Proposed:
        case Scheme::ZfOptimizedSchedule: {
            out.solver = solve(net, ch, weights, cfg.solver);
            out.schedule = extract_schedule(out.solver.beamformers, p, net.antennas, cfg.solver.schedule_threshold);
            out.beamformers = cfg.scheme == Scheme::Proposed
                                  ? apply_schedule(out.solver.beamformers, out.schedule)
                                  : zf_with_optimized_schedule(net, out.schedule, ch.estimate, p);
            break;
        }
        case Scheme::ZfRoundRobin:
            out.schedule = round_robin(net.served, net.antennas, slot);
            out.beamformers = zf_beamformers(net, out.schedule, ch.estimate, p);
            break;
        case Scheme::ConjugateRoundRobin:
            out.schedule = round_robin(net.served, net.antennas, slot);
            out.beamformers = conjugate_beamformers(net, out.schedule, ch.estimate, p);
            break;
    }
    return out;
}

RealizationResult run_realization(const CampaignConfig& cfg, int k) {
    const RealizationSetup setup = setup_realization(cfg, k);
    const NetworkRealization& net = setup.net;
    const double prelog = pre_log(cfg.mode, cfg.tau_d, cfg.tau_p);
    const int nu = net.num_users();

    RealizationResult res;
    res.index = k;
    res.seed = setup.seed;
    res.num_users = nu;
    res.num_rrh = net.num_rrh();
    res.long_term = Eigen::VectorXd::Zero(nu);

    PfState pf = initial_pf(nu);
    for (int t = 0; t < cfg.num_slots; ++t) {
        const ChannelSet ch = slot_channels(cfg, setup, t);
        const Eigen::VectorXd weights = cfg.pf_weights ? pf.weights : Eigen::VectorXd::Ones(nu);
        SchemeOutput out;
        try {
            out = run_scheme(cfg, net, ch, weights, t);
        } catch (const SolverError& e) {
            throw SolverError("realization " + std::to_string(k) + ", slot " + std::to_string(t) + ": " + e.what());
        }

        SlotLedger led;
        led.slot = t;
        led.weights = weights;
        led.rate = actual_rate(net, out.schedule, out.beamformers, ch.truth, cfg.noise_power_w, prelog);
        led.scheduled.assign(nu, 0);
        for (int r = 0; r < net.num_rrh(); ++r) {
            for (std::size_t j = 0; j < net.served[r].size(); ++j)
                if (out.schedule.active[r][j]) led.scheduled[net.served[r][j]] = 1;
            led.max_rrh_load = std::max(led.max_rrh_load, out.schedule.count(r));
        }
        led.sum_rate = led.rate.sum();
        led.solver_iterations = static_cast<int>(out.solver.objective_trace.size());
        led.solver_converged = out.solver.objective_trace.empty() || out.solver.converged;
        pf = update_pf(pf, led.rate, cfg.eta);
        led.average = pf.average;
        if (t >= cfg.num_slots - cfg.window) res.long_term += led.rate;
        if (cfg.keep_traces) res.traces.push_back(out.solver.objective_trace);
        res.slots.push_back(std::move(led));
    }
    res.long_term /= static_cast<double>(cfg.window);
    return res;
}

CampaignMetrics run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    CampaignMetrics m;
    m.pilot_reuse = pilot_reuse_factor(cfg.tau_p, cfg.layout.user_density_per_km2);
    m.pre_log = pre_log(cfg.mode, cfg.tau_d, cfg.tau_p);
    m.realizations.resize(cfg.num_realizations);

    // Each worker owns whole realizations; results land at fixed indices so the
    // output does not depend on scheduling.
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= cfg.num_realizations) return;
            try {
                m.realizations[k] = run_realization(cfg, k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(cfg.num_realizations);
            }
        }
    };
    const int nthreads = std::min(cfg.workers, cfg.num_realizations);
    if (nthreads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return m;
}

}  // namespace cfsched
