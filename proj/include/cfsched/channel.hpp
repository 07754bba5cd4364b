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

#include <vector>

#include <Eigen/Dense>

#include "cfsched/netgen.hpp"
#include "cfsched/pilots.hpp"
#include "cfsched/rng.hpp"

namespace cfsched {

/// Thermal noise power in W from a spectral density (dBm/Hz), a noise figure (dB)
/// and a bandwidth (Hz).
double noise_power(double density_dbm_per_hz, double noise_figure_db, double bandwidth_hz);

/// Per-RRH channel matrices, M x |U|; column u is the vector towards user u.
using ChannelMatrices = std::vector<Eigen::MatrixXcd>;

/// h_ru = sqrt(gain_ru) * g_ru with g_ru ~ CN(0, I_M), for every (r, u).
ChannelMatrices draw_true_channels(const NetworkRealization& net, Rng& rng);

/// Uplink training: Y_r = sum_u sqrt(p_u) h_ru Phi_u + Z_r, each M x tau_p.
ChannelMatrices pilot_phase(const NetworkRealization& net, const PilotAssignment& pilots, const ChannelMatrices& truth,
                            double pilot_power, double noise_power, Rng& rng);

/// LMMSE estimates R_ru R_r^{-1} vec(Y_r) for every (r, u).
///
/// With D_ru a scaled identity, R_r = (Q_r kron I_M) for the tau_p x tau_p matrix
/// Q_r = sum_u p d_ru Phi_u^T Phi_u^* + sigma^2 I, so the M tau_p solve reduces to a
/// tau_p-sized one per RRH. Estimates are produced for all pairs, not only u in E_r,
/// because interference terms need the CU's view of h_{r'u} for r' outside C_u.
ChannelMatrices lmmse_estimate(const ChannelMatrices& received, const NetworkRealization& net,
                               const PilotAssignment& pilots, double pilot_power, double noise_power);

struct ErrorCovariances {
    // Both covariances are scalar multiples of I_M; these hold the scalars.
    Eigen::MatrixXd estimate_var;  // Psi_ru, covariance of the estimate
    Eigen::MatrixXd error_var;     // Theta_ru = D_ru - Psi_ru, covariance of the error
};

ErrorCovariances error_covariances(const NetworkRealization& net, const PilotAssignment& pilots, double pilot_power,
                                   double noise_power);

/// Everything the CU knows (and the evaluator knows) about one slot's channels.
struct ChannelSet {
    int antennas = 1;
    double noise_power = 0.0;  // W
    double pilot_power = 0.0;  // W
    bool perfect = false;
    ChannelMatrices truth;
    ChannelMatrices estimate;
    Eigen::MatrixXd gain;          // D_ru / I_M
    Eigen::MatrixXd estimate_var;  // Psi_ru / I_M
    Eigen::MatrixXd error_var;     // Theta_ru / I_M

    int num_rrh() const { return static_cast<int>(truth.size()); }
    Eigen::MatrixXd D(int r, int u) const { return identity(gain(r, u)); }
    Eigen::MatrixXd Psi(int r, int u) const { return identity(estimate_var(r, u)); }
    Eigen::MatrixXd Theta(int r, int u) const { return identity(error_var(r, u)); }

private:
    Eigen::MatrixXd identity(double s) const { return s * Eigen::MatrixXd::Identity(antennas, antennas); }
};

/// Perfect CSI: estimates equal the truth and the error covariance vanishes.
ChannelSet perfect_csi(const NetworkRealization& net, ChannelMatrices truth, double noise_power);

/// Imperfect CSI from a simulated training phase.
ChannelSet estimated_csi(const NetworkRealization& net, const PilotAssignment& pilots, ChannelMatrices truth,
                         double pilot_power, double noise_power, Rng& rng);

}  // namespace cfsched
