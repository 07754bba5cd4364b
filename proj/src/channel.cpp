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

#include "cfsched/channel.hpp"

#include <cmath>

namespace cfsched {

double noise_power(double density_dbm_per_hz, double noise_figure_db, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("noise_power: bandwidth must be positive");
    return to_watts(Dbm{density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db});
}

ChannelMatrices draw_true_channels(const NetworkRealization& net, Rng& rng) {
    const int m = net.antennas;
    ChannelMatrices h(net.num_rrh(), Eigen::MatrixXcd(m, net.num_users()));
    for (int r = 0; r < net.num_rrh(); ++r)
        for (int u = 0; u < net.num_users(); ++u) {
            const double root = std::sqrt(net.large_scale_gain(r, u));
            for (int a = 0; a < m; ++a) h[r](a, u) = root * complex_normal(rng);
        }
    return h;
}

ChannelMatrices pilot_phase(const NetworkRealization& net, const PilotAssignment& pilots, const ChannelMatrices& truth,
                            double pilot_power, double noise_power, Rng& rng) {
    const int m = net.antennas;
    const int tau = pilots.tau_p;
    const double amp = std::sqrt(pilot_power);
    ChannelMatrices y(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        // Users sharing a pilot superimpose; sum them before the outer product.
        Eigen::MatrixXcd per_pilot = Eigen::MatrixXcd::Zero(m, tau);
        for (int u = 0; u < net.num_users(); ++u) per_pilot.col(pilots.pilot_index[u]) += truth[r].col(u);
        y[r] = amp * per_pilot * pilots.pilot_matrix;
        for (int t = 0; t < tau; ++t)
            for (int a = 0; a < m; ++a) y[r](a, t) += complex_normal(rng, noise_power);
    }
    return y;
}

ChannelMatrices lmmse_estimate(const ChannelMatrices& received, const NetworkRealization& net,
                               const PilotAssignment& pilots, double pilot_power, double noise_power) {
    const int tau = pilots.tau_p;
    const double amp = std::sqrt(pilot_power);
    const Eigen::MatrixXcd& phi = pilots.pilot_matrix;
    ChannelMatrices est(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        Eigen::VectorXd load = Eigen::VectorXd::Zero(tau);
        for (int u = 0; u < net.num_users(); ++u)
            load(pilots.pilot_index[u]) += pilot_power * net.large_scale_gain(r, u);
        // Q = sum_k load_k Phi_k^T Phi_k^* + sigma^2 I
        Eigen::MatrixXcd q = phi.transpose() * load.asDiagonal() * phi.conjugate();
        q.diagonal().array() += noise_power;
        // h_hat_ru = sqrt(p) d_ru Y_r Q^{-T} Phi_u^H
        const Eigen::MatrixXcd z = q.ldlt().solve(received[r].transpose()).transpose();
        const Eigen::MatrixXcd proj = z * phi.adjoint();  // column k: projection on pilot k
        est[r].resize(net.antennas, net.num_users());
        for (int u = 0; u < net.num_users(); ++u)
            est[r].col(u) = (amp * net.large_scale_gain(r, u)) * proj.col(pilots.pilot_index[u]);
    }
    return est;
}

ErrorCovariances error_covariances(const NetworkRealization& net, const PilotAssignment& pilots, double pilot_power,
                                   double noise_power) {
    const int nb = net.num_rrh();
    const int nu = net.num_users();
    ErrorCovariances out;
    out.estimate_var.resize(nb, nu);
    out.error_var.resize(nb, nu);
    const double floor = noise_power / pilot_power;
    for (int r = 0; r < nb; ++r) {
        Eigen::VectorXd load = Eigen::VectorXd::Zero(pilots.tau_p);
        for (int u = 0; u < nu; ++u) load(pilots.pilot_index[u]) += net.large_scale_gain(r, u);
        for (int u = 0; u < nu; ++u) {
            const double d = net.large_scale_gain(r, u);
            const double total = load(pilots.pilot_index[u]) + floor;
            double others = 0.0;  // sum over U_u \ {u}, without cancellation
            for (int v : pilots.copilot_sets[u])
                if (v != u) others += net.large_scale_gain(r, v);
            out.estimate_var(r, u) = d * d / total;
            out.error_var(r, u) = d * (others + floor) / total;
        }
    }
    return out;
}

ChannelSet perfect_csi(const NetworkRealization& net, ChannelMatrices truth, double noise_power) {
    ChannelSet cs;
    cs.antennas = net.antennas;
    cs.noise_power = noise_power;
    cs.perfect = true;
    cs.estimate = truth;
    cs.truth = std::move(truth);
    cs.gain = net.large_scale_gain;
    cs.estimate_var = net.large_scale_gain;
    cs.error_var = Eigen::MatrixXd::Zero(net.num_rrh(), net.num_users());
    return cs;
}

ChannelSet estimated_csi(const NetworkRealization& net, const PilotAssignment& pilots, ChannelMatrices truth,
                         double pilot_power, double noise_power, Rng& rng) {
    ChannelSet cs;
    cs.antennas = net.antennas;
    cs.noise_power = noise_power;
    cs.pilot_power = pilot_power;
    const auto y = pilot_phase(net, pilots, truth, pilot_power, noise_power, rng);
    cs.estimate = lmmse_estimate(y, net, pilots, pilot_power, noise_power);
    cs.truth = std::move(truth);
    cs.gain = net.large_scale_gain;
    auto cov = error_covariances(net, pilots, pilot_power, noise_power);
    cs.estimate_var = std::move(cov.estimate_var);
    cs.error_var = std::move(cov.error_var);
    return cs;
}

}  // namespace cfsched
