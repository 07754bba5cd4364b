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

#include "cfsched/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace cfsched {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Proposed: return "proposed";
        case Scheme::ZfOptimizedSchedule: return "ZF-optSched";
        case Scheme::ZfRoundRobin: return "ZF-RR";
        case Scheme::ConjugateRoundRobin: return "conjugate-RR";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view id) {
    for (Scheme s : all_schemes())
        if (to_string(s) == id) return s;
    throw ConfigError("scheme: unknown identifier '" + std::string(id) +
                      "' (expected proposed, ZF-optSched, ZF-RR or conjugate-RR)");
}

std::vector<Scheme> all_schemes() {
    return {Scheme::Proposed, Scheme::ZfOptimizedSchedule, Scheme::ZfRoundRobin, Scheme::ConjugateRoundRobin};
}

Schedule round_robin(const std::vector<std::vector<int>>& served, int max_per_rrh, int slot_index) {
    Schedule s;
    s.active.resize(served.size());
    for (std::size_t r = 0; r < served.size(); ++r) {
        const int n = static_cast<int>(served[r].size());
        s.active[r].assign(n, 0);
        if (n == 0) continue;
        const int per_slot = std::min(max_per_rrh, n);
        const long long start = (static_cast<long long>(slot_index) * per_slot) % n;
        for (int k = 0; k < per_slot; ++k) s.active[r][(start + k) % n] = 1;
    }
    return s;
}

namespace {

// Columns W with H^H W = I for a full-column-rank H, via a thin QR: W = Q R^{-H}.
Eigen::MatrixXcd pseudo_inverse_columns(const Eigen::MatrixXcd& h) {
    const Eigen::Index k = h.cols();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(h);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(h.rows(), k);
    const Eigen::MatrixXcd rmat = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXcd x =
        rmat.adjoint().triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(k, k));
    return q * x;
}

bool full_column_rank(const Eigen::MatrixXcd& h) {
    if (h.cols() > h.rows()) return false;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(h);
    qr.setThreshold(1e-10);
    return qr.rank() == h.cols();
}

}  // namespace

Beamformers zf_beamformers(const NetworkRealization& net, const Schedule& schedule, const ChannelMatrices& estimates,
                           double power_budget) {
    Beamformers w(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto& served = net.served[r];
        w[r] = Eigen::MatrixXcd::Zero(net.antennas, static_cast<Eigen::Index>(served.size()));
        std::vector<int> cols;
        for (std::size_t j = 0; j < served.size(); ++j)
            if (schedule.active[r][j] && estimates[r].col(served[j]).norm() > 0.0) cols.push_back(static_cast<int>(j));
        if (static_cast<int>(cols.size()) > net.antennas)
            throw ContractError("zf_beamformers: more scheduled users than antennas at RRH " + std::to_string(r));

        for (;;) {
            if (cols.empty()) break;
            Eigen::MatrixXcd h(net.antennas, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) h.col(k) = estimates[r].col(served[cols[k]]);
            if (!full_column_rank(h)) {
                Eigen::Index weakest = 0;
                h.colwise().norm().minCoeff(&weakest);
                cols.erase(cols.begin() + weakest);
                continue;
            }
            const Eigen::MatrixXcd pinv = pseudo_inverse_columns(h);
            const double amp = std::sqrt(power_budget / static_cast<double>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k)
                w[r].col(cols[k]) = (amp / pinv.col(k).norm()) * pinv.col(k);
            break;
        }
    }
    return w;
}

Beamformers conjugate_beamformers(const NetworkRealization& net, const Schedule& schedule,
                                  const ChannelMatrices& estimates, double power_budget) {
    Beamformers w(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto& served = net.served[r];
        w[r] = Eigen::MatrixXcd::Zero(net.antennas, static_cast<Eigen::Index>(served.size()));
        std::vector<int> cols;
        for (std::size_t j = 0; j < served.size(); ++j)
            if (schedule.active[r][j] && estimates[r].col(served[j]).norm() > 0.0) cols.push_back(static_cast<int>(j));
        if (cols.empty()) continue;
        const double amp = std::sqrt(power_budget / static_cast<double>(cols.size()));
        for (int j : cols) {
            const auto h = estimates[r].col(served[j]);
            w[r].col(j) = (amp / h.norm()) * h;
        }
    }
    return w;
}

Beamformers zf_with_optimized_schedule(const NetworkRealization& net, const Schedule& proposed_schedule,
                                       const ChannelMatrices& estimates, double power_budget) {
    return zf_beamformers(net, proposed_schedule, estimates, power_budget);
}

}  // namespace cfsched
