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

// Small hand-built instances and independent reference evaluators shared by the
// unit and acceptance tests. The reference code here is written from the model
// definitions with plain loops and does not call the library's own kernels.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cfsched/channel.hpp"
#include "cfsched/netgen.hpp"
#include "cfsched/rng.hpp"
#include "cfsched/solver.hpp"

namespace cfsched::testing {

using cd = std::complex<double>;

/// Every RRH serves every user; gains drawn in [0.5, 1.5].
inline NetworkRealization micro_network(Rng& rng, int nb, int nu, int m, bool full_clusters = true) {
    std::uniform_real_distribution<double> g(0.5, 1.5);
    NetworkRealization net;
    net.antennas = m;
    net.rrh_positions.assign(nb, Point{});
    net.user_positions.assign(nu, Point{});
    net.large_scale_gain.resize(nb, nu);
    net.shadowing = Eigen::MatrixXd::Ones(nb, nu);
    net.distance_km = Eigen::MatrixXd::Ones(nb, nu);
    for (int r = 0; r < nb; ++r)
        for (int u = 0; u < nu; ++u) net.large_scale_gain(r, u) = g(rng);
    net.clusters.assign(nu, {});
    net.served.assign(nb, {});
    std::bernoulli_distribution coin(0.6);
    for (int u = 0; u < nu; ++u) {
        for (int r = 0; r < nb; ++r)
            if (full_clusters || coin(rng)) net.clusters[u].push_back(r);
        if (net.clusters[u].empty()) net.clusters[u].push_back(u % nb);
        for (int r : net.clusters[u]) net.served[r].push_back(u);
    }
    return net;
}

/// Estimates drawn i.i.d.; error variances in [0, err_scale].
inline ChannelSet micro_channels(const NetworkRealization& net, Rng& rng, double noise, double err_scale) {
    std::uniform_real_distribution<double> e(0.0, err_scale);
    ChannelSet ch;
    ch.antennas = net.antennas;
    ch.noise_power = noise;
    ch.perfect = err_scale == 0.0;
    ch.truth.assign(net.num_rrh(), Eigen::MatrixXcd(net.antennas, net.num_users()));
    for (int r = 0; r < net.num_rrh(); ++r)
        for (int u = 0; u < net.num_users(); ++u)
            for (int a = 0; a < net.antennas; ++a)
                ch.truth[r](a, u) = std::sqrt(net.large_scale_gain(r, u)) * complex_normal(rng);
    ch.estimate = ch.truth;
    ch.gain = net.large_scale_gain;
    ch.error_var.resize(net.num_rrh(), net.num_users());
    for (int r = 0; r < net.num_rrh(); ++r)
        for (int u = 0; u < net.num_users(); ++u) ch.error_var(r, u) = e(rng);
    ch.estimate_var = ch.gain - ch.error_var;
    return ch;
}

inline Beamformers random_beamformers(const NetworkRealization& net, Rng& rng, double scale = 0.5) {
    Beamformers w(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        w[r].resize(net.antennas, static_cast<Eigen::Index>(net.served[r].size()));
        for (Eigen::Index j = 0; j < w[r].cols(); ++j)
            for (int a = 0; a < net.antennas; ++a) w[r](a, j) = scale * complex_normal(rng);
    }
    return w;
}

/// w^H h with explicit sums.
inline cd inner(const Eigen::MatrixXcd& w, Eigen::Index j, const Eigen::MatrixXcd& h, int u) {
    cd s = 0.0;
    for (Eigen::Index a = 0; a < w.rows(); ++a) s += std::conj(w(a, j)) * h(a, u);
    return s;
}

inline double sq(const Eigen::MatrixXcd& w, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index a = 0; a < w.rows(); ++a) s += std::norm(w(a, j));
    return s;
}

struct RefBudget {
    std::vector<double> signal, interference;
};

/// Signal and interference-plus-noise per user straight from the model: every
/// candidate link transmits, error covariance theta * I adds theta * ||w||^2.
inline RefBudget ref_budget(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w) {
    const int nu = net.num_users();
    RefBudget b{std::vector<double>(nu, 0.0), std::vector<double>(nu, ch.noise_power)};
    for (int u = 0; u < nu; ++u)
        for (int r = 0; r < net.num_rrh(); ++r)
            for (std::size_t j = 0; j < net.served[r].size(); ++j) {
                const int v = net.served[r][j];
                const double leak = std::norm(inner(w[r], j, ch.estimate[r], u)) + ch.error_var(r, u) * sq(w[r], j);
                if (v == u) {
                    b.signal[u] += std::norm(inner(w[r], j, ch.estimate[r], u));
                    b.interference[u] += ch.error_var(r, u) * sq(w[r], j);
                } else {
                    b.interference[u] += leak;
                }
            }
    return b;
}

inline std::vector<double> ref_sinr(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w) {
    const RefBudget b = ref_budget(net, ch, w);
    std::vector<double> g(b.signal.size());
    for (std::size_t u = 0; u < g.size(); ++u) g[u] = b.signal[u] / b.interference[u];
    return g;
}

/// Quadratic-transform objective written out term by term.
inline double ref_f4(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                     const Eigen::VectorXd& gamma, const LinkValues& beta, const Eigen::VectorXd& delta) {
    const RefBudget b = ref_budget(net, ch, w);
    double f = 0.0;
    for (int u = 0; u < net.num_users(); ++u) f += delta(u) * (std::log(1.0 + gamma(u)) - gamma(u));
    for (int r = 0; r < net.num_rrh(); ++r)
        for (std::size_t j = 0; j < net.served[r].size(); ++j) {
            const int u = net.served[r][j];
            const double c = std::sqrt(delta(u) * (1.0 + gamma(u)));
            const cd x = inner(w[r], j, ch.estimate[r], u);
            const double total = b.signal[u] + b.interference[u];
            f += 2.0 * c * std::real(std::conj(beta[r](j)) * x) - std::norm(beta[r](j)) * total;
        }
    return f;
}

/// f4 minus the multiplier penalties, the function whose stationary point the
/// beamformer update claims to be.
inline double ref_lagrangian(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                             const Eigen::VectorXd& gamma, const LinkValues& beta, const LinkWeights& alpha,
                             const Eigen::VectorXd& delta, const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda,
                             double p, int m) {
    double l = ref_f4(net, ch, w, gamma, beta, delta);
    for (int r = 0; r < net.num_rrh(); ++r) {
        double power = 0.0, cap = 0.0;
        for (Eigen::Index j = 0; j < w[r].cols(); ++j) {
            power += sq(w[r], j);
            cap += alpha[r](j) * sq(w[r], j);
        }
        l -= mu(r) * (power - p) + lambda(r) * (cap - m);
    }
    return l;
}

/// Central-difference gradient of the Lagrangian with respect to the real and
/// imaginary parts of every beamformer entry.
inline std::vector<double> fd_gradient(const NetworkRealization& net, const ChannelSet& ch, Beamformers w,
                                       const Eigen::VectorXd& gamma, const LinkValues& beta, const LinkWeights& alpha,
                                       const Eigen::VectorXd& delta, const Eigen::VectorXd& mu,
                                       const Eigen::VectorXd& lambda, double p, int m, double step) {
    std::vector<double> g;
    for (int r = 0; r < net.num_rrh(); ++r)
        for (Eigen::Index j = 0; j < w[r].cols(); ++j)
            for (Eigen::Index a = 0; a < w[r].rows(); ++a)
                for (cd dir : {cd(1.0, 0.0), cd(0.0, 1.0)}) {
                    const cd orig = w[r](a, j);
                    w[r](a, j) = orig + step * dir;
                    const double up = ref_lagrangian(net, ch, w, gamma, beta, alpha, delta, mu, lambda, p, m);
                    w[r](a, j) = orig - step * dir;
                    const double dn = ref_lagrangian(net, ch, w, gamma, beta, alpha, delta, mu, lambda, p, m);
                    w[r](a, j) = orig;
                    g.push_back((up - dn) / (2.0 * step));
                }
    return g;
}

}  // namespace cfsched::testing
