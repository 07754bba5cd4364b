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

#include "cfsched/channel.hpp"
#include "cfsched/netgen.hpp"

namespace cfsched {

/// Per-RRH beamformer matrices, M x |E_r|; column j serves user served[r][j].
using Beamformers = std::vector<Eigen::MatrixXcd>;

/// Per-RRH complex scalars aligned with served[r].
using LinkValues = std::vector<Eigen::VectorXcd>;

/// Per-RRH real scalars aligned with served[r].
using LinkWeights = std::vector<Eigen::VectorXd>;

struct SolverConfig {
    double power_budget = 1.0;        // p, W
    double epsilon = 0.1125;          // reweighting stabiliser, W
    double tol_converge = 1e-5;       // relative change of the objective
    int k_stable = 3;                 // consecutive iterations under tol_converge
    int max_iterations = 200;
    double lambda_init_scale = 1e-3;  // first lambda, relative to the mu scale
    int lambda_max_doublings = 10;
    int lambda_refine_steps = 40;     // bisection on lambda once a feasible value is bracketed
    double schedule_threshold = 1e-4; // fraction of p for a link to count as scheduled
};

/// Binary scheduling flags aligned with served[r].
struct Schedule {
    std::vector<std::vector<char>> active;

    int count(int r) const;
    int total() const;
};

struct IterationRecord {
    double objective = 0.0;
    Eigen::VectorXd power;   // per RRH, after the multiplier update
    Eigen::VectorXd mu;
    Eigen::VectorXd lambda;
    Eigen::VectorXd capacity;  // sum_u alpha_ru ||w_ru||^2 with the alpha used for this W
    int active_links = 0;      // ||w||^2 > schedule_threshold * p
};

struct SolverState {
    Beamformers beamformers;
    Eigen::VectorXd sinr;  // gamma_u
    LinkValues beta;
    LinkWeights alpha;
    Eigen::VectorXd mu;
    Eigen::VectorXd lambda;
    Eigen::VectorXd weights;  // delta_u
    std::vector<double> objective_trace;
    std::vector<IterationRecord> iterations;
    bool converged = false;
    int singular_warnings = 0;
    int capacity_cap_hits = 0;
};

/// Signal S_u, interference-plus-noise B_u and total received power D_u = S_u + B_u
/// at every user, with all candidate links active and the error covariance included.
struct LinkBudget {
    Eigen::VectorXd signal;
    Eigen::VectorXd interference;
    Eigen::VectorXd total;
    LinkValues response;  // w_ru^H h_hat_ru, aligned with served[r]
};

LinkBudget link_budget(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w);

/// gamma_u = S_u / B_u.
Eigen::VectorXd update_gamma(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w);

/// Closed-form maximiser of the quadratic transform in beta for fixed W and gamma.
LinkValues update_beta(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                       const Eigen::VectorXd& gamma, const Eigen::VectorXd& delta);

/// The per-RRH quadratic program in W for fixed gamma, beta. Holds the eigen-
/// decomposition of K_r = sum_u b_u (h_hat_ru h_hat_ru^H + Theta_ru) so that any
/// multiplier pair can be evaluated in O(|E_r| M).
class RrhBeamProblem {
public:
    RrhBeamProblem(const NetworkRealization& net, const ChannelSet& ch, int r, const Eigen::VectorXd& gamma,
                   const LinkValues& beta, const Eigen::VectorXd& delta, const Eigen::VectorXd& beta_energy);

    int links() const { return static_cast<int>(gain_.size()); }

    /// Sum of ||w_ru||^2 for the given multipliers.
    double power(double mu, double lambda, const Eigen::VectorXd& alpha) const;

    /// Sum of alpha_ru ||w_ru||^2 for the given multipliers.
    double capacity(double mu, double lambda, const Eigen::VectorXd& alpha) const;

    Eigen::MatrixXcd beamformers(double mu, double lambda, const Eigen::VectorXd& alpha) const;

    /// Smallest mu >= 0 with power <= budget (mu = 0 if already feasible).
    double bisect_mu(double lambda, const Eigen::VectorXd& alpha, double budget) const;

    double largest_eigenvalue() const { return eig_.size() ? eig_.maxCoeff() : 0.0; }
    bool singular() const { return singular_; }

private:
    double denom(int m, double shift) const;

    Eigen::VectorXd eig_;
    Eigen::MatrixXcd basis_;
    Eigen::MatrixXcd proj_;   // V^H h_hat_ru per link
    Eigen::VectorXcd gain_;   // sqrt(delta(1+gamma)) conj(beta_ru)
    double floor_ = 0.0;      // jitter on near-zero eigenvalues
    bool singular_ = false;
};

/// b_u = sum_{r in C_u} |beta_ru|^2.
Eigen::VectorXd beta_energy(const NetworkRealization& net, const LinkValues& beta);

/// Stationary point of the Lagrangian in W for given multipliers.
Beamformers update_beamformers(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& gamma,
                               const LinkValues& beta, const LinkWeights& alpha, const Eigen::VectorXd& delta,
                               const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda);

struct MultiplierUpdate {
    Eigen::VectorXd mu;
    Eigen::VectorXd lambda;
    Beamformers beamformers;
    int singular_warnings = 0;
    int capacity_cap_hits = 0;
};

/// Per RRH: lambda = 0 and bisection on mu for the power budget; if the reweighted
/// capacity surrogate exceeds M, raise lambda (doubling, then bisection) until it holds.
MultiplierUpdate update_multipliers(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& gamma,
                                    const LinkValues& beta, const LinkWeights& alpha, const Eigen::VectorXd& delta,
                                    const SolverConfig& cfg);

/// alpha_ru = 1 / (||w_ru||^2 + epsilon).
LinkWeights update_alpha(const Beamformers& w, double epsilon);

/// Quadratic-transform objective; evaluated in extended precision because its
/// terms cancel to roughly the size of the sum rate.
double objective_f4(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                    const Eigen::VectorXd& gamma, const LinkValues& beta, const Eigen::VectorXd& delta);

/// Weighted sum rate sum_u delta_u ln(1 + gamma_u) with gamma from the SINR definition.
double weighted_sum_rate(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                         const Eigen::VectorXd& delta);

/// Conjugate beamforming over all candidate links with an equal power split.
Beamformers conjugate_init(const NetworkRealization& net, const ChannelSet& ch, double power_budget);

/// Total transmit power per RRH.
Eigen::VectorXd rrh_power(const Beamformers& w);

/// Joint scheduling and beamforming by block coordinate ascent.
SolverState solve(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& delta,
                  const SolverConfig& cfg);

/// s_ru = 1 iff ||w_ru||^2 > threshold_frac * p, keeping at most the M strongest per RRH.
Schedule extract_schedule(const Beamformers& w, double power_budget, int max_per_rrh, double threshold_frac);

/// Zero the beamformers of unscheduled links.
Beamformers apply_schedule(Beamformers w, const Schedule& s);

}  // namespace cfsched
