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

#include "cfsched/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace cfsched {

int Schedule::count(int r) const {
    return static_cast<int>(std::count(active.at(r).begin(), active.at(r).end(), 1));
}

int Schedule::total() const {
    int n = 0;
    for (std::size_t r = 0; r < active.size(); ++r) n += count(static_cast<int>(r));
    return n;
}

LinkBudget link_budget(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w) {
    const int nu = net.num_users();
    LinkBudget lb;
    lb.signal = Eigen::VectorXd::Zero(nu);
    lb.interference = Eigen::VectorXd::Constant(nu, ch.noise_power);
    lb.total = Eigen::VectorXd::Constant(nu, ch.noise_power);
    lb.response.resize(net.num_rrh());

    for (int r = 0; r < net.num_rrh(); ++r) {
        const Eigen::MatrixXcd& wr = w[r];
        const auto& served = net.served[r];
        lb.response[r] = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(served.size()));
        if (wr.cols() == 0) continue;
        const double power = wr.squaredNorm();
        const Eigen::MatrixXcd& h = ch.estimate[r];
        const Eigen::MatrixXcd gram = wr * wr.adjoint();
        // received(u) = h_u^H W W^H h_u for every user at once
        const Eigen::RowVectorXd received =
            h.conjugate().cwiseProduct(gram * h).colwise().sum().real().cwiseMax(0.0);
        Eigen::MatrixXcd hs(h.rows(), static_cast<Eigen::Index>(served.size()));
        for (std::size_t j = 0; j < served.size(); ++j) hs.col(static_cast<Eigen::Index>(j)) = h.col(served[j]);
        const Eigen::MatrixXcd v = wr.adjoint() * hs;  // v(k, j) = w_k^H h_{served[j]}

        std::size_t next = 0;
        for (int u = 0; u < nu; ++u) {
            const double err = ch.error_var(r, u) * power;
            double others = received(u);
            if (next < served.size() && served[next] == u) {
                const auto j = static_cast<Eigen::Index>(next++);
                const double own = std::norm(v(j, j));
                others = 0.0;
                for (Eigen::Index k = 0; k < v.rows(); ++k)
                    if (k != j) others += std::norm(v(k, j));
                lb.signal(u) += own;
                lb.total(u) += own;
                lb.response[r](j) = v(j, j);
            }
            lb.interference(u) += others + err;
            lb.total(u) += others + err;
        }
    }
    return lb;
}

Eigen::VectorXd update_gamma(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w) {
    const LinkBudget lb = link_budget(net, ch, w);
    return lb.signal.cwiseQuotient(lb.interference);
}

LinkValues update_beta(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                       const Eigen::VectorXd& gamma, const Eigen::VectorXd& delta) {
    const LinkBudget lb = link_budget(net, ch, w);
    LinkValues beta(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto& served = net.served[r];
        beta[r].resize(static_cast<Eigen::Index>(served.size()));
        for (std::size_t j = 0; j < served.size(); ++j) {
            const int u = served[j];
            const double c = std::sqrt(delta(u) * (1.0 + gamma(u)));
            beta[r](j) = c * lb.response[r](j) / lb.total(u);
        }
    }
    return beta;
}

Eigen::VectorXd beta_energy(const NetworkRealization& net, const LinkValues& beta) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(net.num_users());
    for (int r = 0; r < net.num_rrh(); ++r)
        for (std::size_t j = 0; j < net.served[r].size(); ++j) b(net.served[r][j]) += std::norm(beta[r](j));
    return b;
}

RrhBeamProblem::RrhBeamProblem(const NetworkRealization& net, const ChannelSet& ch, int r,
                               const Eigen::VectorXd& gamma, const LinkValues& beta, const Eigen::VectorXd& delta,
                               const Eigen::VectorXd& energy) {
    const int m = net.antennas;
    const Eigen::MatrixXcd& h = ch.estimate[r];
    const Eigen::MatrixXcd scaled = h * energy.cwiseSqrt().asDiagonal();
    Eigen::MatrixXcd k = scaled * scaled.adjoint();
    k.diagonal().array() += energy.dot(ch.error_var.row(r).transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    if (es.info() != Eigen::Success) throw SolverError("eigendecomposition failed at RRH " + std::to_string(r));
    eig_ = es.eigenvalues().cwiseMax(0.0);
    basis_ = es.eigenvectors();
    const double top = eig_.size() ? eig_.maxCoeff() : 0.0;
    floor_ = 1e-12 * top;
    singular_ = m > 0 && eig_.minCoeff() <= floor_;

    const auto& served = net.served[r];
    proj_.resize(m, static_cast<Eigen::Index>(served.size()));
    gain_.resize(static_cast<Eigen::Index>(served.size()));
    for (std::size_t j = 0; j < served.size(); ++j) {
        const int u = served[j];
        proj_.col(j) = basis_.adjoint() * h.col(u);
        gain_(j) = std::sqrt(delta(u) * (1.0 + gamma(u))) * std::conj(beta[r](j));
    }
}

double RrhBeamProblem::denom(int m, double shift) const { return std::max(eig_(m) + shift, floor_); }

double RrhBeamProblem::power(double mu, double lambda, const Eigen::VectorXd& alpha) const {
    double total = 0.0;
    for (int j = 0; j < links(); ++j) {
        const double g2 = std::norm(gain_(j));
        if (g2 == 0.0) continue;
        const double shift = mu + lambda * alpha(j);
        double s = 0.0;
        for (int m = 0; m < eig_.size(); ++m) {
            const double d = denom(m, shift);
            if (d > 0.0) s += std::norm(proj_(m, j)) / (d * d);
        }
        total += g2 * s;
    }
    return total;
}

double RrhBeamProblem::capacity(double mu, double lambda, const Eigen::VectorXd& alpha) const {
    double total = 0.0;
    for (int j = 0; j < links(); ++j) {
        const double g2 = std::norm(gain_(j));
        if (g2 == 0.0) continue;
        const double shift = mu + lambda * alpha(j);
        double s = 0.0;
        for (int m = 0; m < eig_.size(); ++m) {
            const double d = denom(m, shift);
            if (d > 0.0) s += std::norm(proj_(m, j)) / (d * d);
        }
        total += alpha(j) * g2 * s;
    }
    return total;
}

Eigen::MatrixXcd RrhBeamProblem::beamformers(double mu, double lambda, const Eigen::VectorXd& alpha) const {
    const int m_ant = static_cast<int>(eig_.size());
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(m_ant, links());
    Eigen::VectorXcd coeff(m_ant);
    for (int j = 0; j < links(); ++j) {
        if (gain_(j) == 0.0) continue;
        const double shift = mu + lambda * alpha(j);
        for (int m = 0; m < m_ant; ++m) {
            const double d = denom(m, shift);
            coeff(m) = d > 0.0 ? proj_(m, j) / d : 0.0;
        }
        w.col(j) = gain_(j) * (basis_ * coeff);
    }
    return w;
}

double RrhBeamProblem::bisect_mu(double lambda, const Eigen::VectorXd& alpha, double budget) const {
    if (power(0.0, lambda, alpha) <= budget) return 0.0;
    // power(mu) <= sum_j |g_j|^2 ||z_j||^2 / mu^2, which brackets the root from above.
    double bound = 0.0;
    for (int j = 0; j < links(); ++j) bound += std::norm(gain_(j)) * proj_.col(j).squaredNorm();
    double lo = 0.0;
    double hi = std::sqrt(bound / budget);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double p = power(mid, lambda, alpha);
        if (p > budget) {
            lo = mid;
        } else {
            hi = mid;
            if (p >= budget * (1.0 - 1e-10)) break;
        }
    }
    return hi;
}

namespace {

struct RrhMultipliers {
    double mu = 0.0;
    double lambda = 0.0;
    bool cap_hit = false;
};

RrhMultipliers solve_rrh_multipliers(const RrhBeamProblem& prob, const Eigen::VectorXd& alpha, int max_links,
                                     const SolverConfig& cfg) {
    const double p = cfg.power_budget;
    const double limit = static_cast<double>(max_links);
    RrhMultipliers out;
    out.mu = prob.bisect_mu(0.0, alpha, p);
    if (prob.capacity(out.mu, 0.0, alpha) <= limit) return out;

    const double mean_alpha = alpha.mean();
    const double mu_scale = std::max(out.mu, prob.largest_eigenvalue());
    double lo = 0.0;
    double hi = cfg.lambda_init_scale * mu_scale / mean_alpha;
    bool feasible = false;
    for (int k = 0; k <= cfg.lambda_max_doublings; ++k) {
        const double mu = prob.bisect_mu(hi, alpha, p);
        if (prob.capacity(mu, hi, alpha) <= limit) {
            feasible = true;
            break;
        }
        if (k == cfg.lambda_max_doublings) break;
        lo = hi;
        hi *= 2.0;
    }
    if (!feasible) {
        out.lambda = hi;
        out.mu = prob.bisect_mu(hi, alpha, p);
        out.cap_hit = true;
        return out;
    }
    for (int it = 0; it < cfg.lambda_refine_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double mu = prob.bisect_mu(mid, alpha, p);
        if (prob.capacity(mu, mid, alpha) <= limit)
            hi = mid;
        else
            lo = mid;
    }
    out.lambda = hi;
    out.mu = prob.bisect_mu(hi, alpha, p);
    return out;
}

}  // namespace

Beamformers update_beamformers(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& gamma,
                               const LinkValues& beta, const LinkWeights& alpha, const Eigen::VectorXd& delta,
                               const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda) {
    const Eigen::VectorXd energy = beta_energy(net, beta);
    Beamformers w(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const RrhBeamProblem prob(net, ch, r, gamma, beta, delta, energy);
        w[r] = prob.beamformers(mu(r), lambda(r), alpha[r]);
    }
    return w;
}

MultiplierUpdate update_multipliers(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& gamma,
                                    const LinkValues& beta, const LinkWeights& alpha, const Eigen::VectorXd& delta,
                                    const SolverConfig& cfg) {
    const Eigen::VectorXd energy = beta_energy(net, beta);
    MultiplierUpdate out;
    out.mu = Eigen::VectorXd::Zero(net.num_rrh());
    out.lambda = Eigen::VectorXd::Zero(net.num_rrh());
    out.beamformers.resize(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const RrhBeamProblem prob(net, ch, r, gamma, beta, delta, energy);
        if (prob.links() == 0) {
            out.beamformers[r] = Eigen::MatrixXcd(net.antennas, 0);
            continue;
        }
        const RrhMultipliers mult = solve_rrh_multipliers(prob, alpha[r], net.antennas, cfg);
        out.mu(r) = mult.mu;
        out.lambda(r) = mult.lambda;
        if (mult.cap_hit) ++out.capacity_cap_hits;
        if (prob.singular() && mult.mu == 0.0 && mult.lambda == 0.0) ++out.singular_warnings;
        out.beamformers[r] = prob.beamformers(mult.mu, mult.lambda, alpha[r]);
    }
    return out;
}

LinkWeights update_alpha(const Beamformers& w, double epsilon) {
    LinkWeights alpha(w.size());
    for (std::size_t r = 0; r < w.size(); ++r)
        alpha[r] = (w[r].colwise().squaredNorm().transpose().array() + epsilon).inverse().matrix();
    return alpha;
}

double objective_f4(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                    const Eigen::VectorXd& gamma, const LinkValues& beta, const Eigen::VectorXd& delta) {
    using Real = long double;
    using Cplx = std::complex<Real>;
    using MatX = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic>;
    using VecX = Eigen::Matrix<Cplx, Eigen::Dynamic, 1>;

    const int nu = net.num_users();
    std::vector<Real> total(nu, static_cast<Real>(ch.noise_power));
    std::vector<MatX> wl(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        wl[r] = w[r].cast<Cplx>();
        if (wl[r].cols() == 0) continue;
        const MatX gram = wl[r] * wl[r].adjoint();
        const Real power = gram.trace().real();
        const MatX h = ch.estimate[r].cast<Cplx>();
        const MatX gh = gram * h;
        for (int u = 0; u < nu; ++u)
            total[u] += h.col(u).dot(gh.col(u)).real() + static_cast<Real>(ch.error_var(r, u)) * power;
    }

    Real f = 0.0L;
    for (int u = 0; u < nu; ++u) {
        const Real g = gamma(u);
        f += static_cast<Real>(delta(u)) * (std::log1p(g) - g);
    }
    for (int r = 0; r < net.num_rrh(); ++r) {
        for (std::size_t j = 0; j < net.served[r].size(); ++j) {
            const int u = net.served[r][j];
            const Real c = std::sqrt(static_cast<Real>(delta(u)) * (1.0L + static_cast<Real>(gamma(u))));
            const VecX h = ch.estimate[r].col(u).cast<Cplx>();
            const Cplx response = (wl[r].col(j).adjoint() * h)(0, 0);
            const Cplx b = Cplx(beta[r](j).real(), beta[r](j).imag());
            f += 2.0L * (std::conj(b) * c * response).real() - std::norm(b) * total[u];
        }
    }
    return static_cast<double>(f);
}

double weighted_sum_rate(const NetworkRealization& net, const ChannelSet& ch, const Beamformers& w,
                         const Eigen::VectorXd& delta) {
    const Eigen::VectorXd gamma = update_gamma(net, ch, w);
    double f = 0.0;
    for (int u = 0; u < net.num_users(); ++u) f += delta(u) * std::log1p(gamma(u));
    return f;
}

Beamformers conjugate_init(const NetworkRealization& net, const ChannelSet& ch, double power_budget) {
    Beamformers w(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto& served = net.served[r];
        w[r] = Eigen::MatrixXcd::Zero(net.antennas, static_cast<Eigen::Index>(served.size()));
        if (served.empty()) continue;
        const double amp = std::sqrt(power_budget / static_cast<double>(served.size()));
        for (std::size_t j = 0; j < served.size(); ++j) {
            const auto h = ch.estimate[r].col(served[j]);
            const double n = h.norm();
            if (n > 0.0) w[r].col(j) = (amp / n) * h;
        }
    }
    return w;
}

Eigen::VectorXd rrh_power(const Beamformers& w) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(w.size()));
    for (std::size_t r = 0; r < w.size(); ++r) p(r) = w[r].squaredNorm();
    return p;
}

namespace {

bool all_finite(const Beamformers& w) {
    return std::all_of(w.begin(), w.end(), [](const Eigen::MatrixXcd& m) { return m.allFinite(); });
}

int count_active(const Beamformers& w, double threshold) {
    int n = 0;
    for (const auto& m : w) n += static_cast<int>((m.colwise().squaredNorm().array() > threshold).count());
    return n;
}

}  // namespace

SolverState solve(const NetworkRealization& net, const ChannelSet& ch, const Eigen::VectorXd& delta,
                  const SolverConfig& cfg) {
    if (delta.size() != net.num_users() || !(delta.array() > 0.0).all())
        throw ContractError("solve: weights must be positive, one per user");

    const double p = cfg.power_budget;
    SolverState st;
    st.weights = delta;
    st.beamformers = conjugate_init(net, ch, p);
    st.alpha.resize(net.num_rrh());
    for (int r = 0; r < net.num_rrh(); ++r) {
        const auto n = static_cast<Eigen::Index>(net.served[r].size());
        st.alpha[r] = Eigen::VectorXd::Constant(n, n ? 1.0 / (p / static_cast<double>(n) + cfg.epsilon) : 0.0);
    }

    int stable = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        st.sinr = update_gamma(net, ch, st.beamformers);
        st.beta = update_beta(net, ch, st.beamformers, st.sinr, delta);
        MultiplierUpdate mult = update_multipliers(net, ch, st.sinr, st.beta, st.alpha, delta, cfg);
        const double f = objective_f4(net, ch, mult.beamformers, st.sinr, st.beta, delta);

        if (!std::isfinite(f) || !all_finite(mult.beamformers) || !st.sinr.allFinite()) {
            std::ostringstream msg;
            msg << "solver produced a non-finite value at iteration " << it << " (objective " << f << ")";
            throw SolverError(msg.str());
        }

        IterationRecord rec;
        rec.objective = f;
        rec.power = rrh_power(mult.beamformers);
        rec.mu = mult.mu;
        rec.lambda = mult.lambda;
        rec.capacity.resize(net.num_rrh());
        for (int r = 0; r < net.num_rrh(); ++r)
            rec.capacity(r) = mult.beamformers[r].cols()
                                  ? st.alpha[r].dot(mult.beamformers[r].colwise().squaredNorm().transpose())
                                  : 0.0;
        rec.active_links = count_active(mult.beamformers, cfg.schedule_threshold * p);
        st.iterations.push_back(std::move(rec));
        st.singular_warnings += mult.singular_warnings;
        st.capacity_cap_hits += mult.capacity_cap_hits;

        st.mu = mult.mu;
        st.lambda = mult.lambda;
        st.beamformers = std::move(mult.beamformers);
        st.alpha = update_alpha(st.beamformers, cfg.epsilon);

        if (!st.objective_trace.empty()) {
            const double rel = std::abs(f - st.objective_trace.back()) / std::max(1.0, std::abs(f));
            stable = rel < cfg.tol_converge ? stable + 1 : 0;
        }
        st.objective_trace.push_back(f);
        if (stable >= cfg.k_stable) {
            st.converged = true;
            break;
        }
    }
    return st;
}

Schedule extract_schedule(const Beamformers& w, double power_budget, int max_per_rrh, double threshold_frac) {
    Schedule s;
    s.active.resize(w.size());
    const double threshold = threshold_frac * power_budget;
    for (std::size_t r = 0; r < w.size(); ++r) {
        const Eigen::VectorXd norms = w[r].colwise().squaredNorm().transpose();
        const auto n = static_cast<int>(norms.size());
        s.active[r].assign(n, 0);
        std::vector<int> idx;
        for (int j = 0; j < n; ++j)
            if (norms(j) > threshold) idx.push_back(j);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return norms(a) > norms(b); });
        if (static_cast<int>(idx.size()) > max_per_rrh) idx.resize(max_per_rrh);
        for (int j : idx) s.active[r][j] = 1;
    }
    return s;
}

Beamformers apply_schedule(Beamformers w, const Schedule& s) {
    for (std::size_t r = 0; r < w.size(); ++r)
        for (Eigen::Index j = 0; j < w[r].cols(); ++j)
            if (!s.active[r][j]) w[r].col(j).setZero();
    return w;
}

}  // namespace cfsched
