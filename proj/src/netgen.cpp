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

#include "cfsched/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cfsched {

double path_loss_db(double distance_km) {
    if (!(distance_km > 0.0)) throw std::domain_error("path_loss_db: distance must be positive");
    return -112.4271 - 38.0 * std::log10(distance_km);
}

double path_loss_linear(double distance_km) { return db_to_linear(path_loss_db(distance_km)); }

void LayoutConfig::validate() const {
    if (num_cells != 1 && num_cells != 7)
        throw ConfigError("layout.num_cells: only 1 or 7 cells are supported");
    if (rrh_per_cell < 1) throw ConfigError("layout.rrh_per_cell: must be >= 1");
    if (antennas_per_rrh < 1) throw ConfigError("layout.antennas_per_rrh: must be >= 1");
    if (!(cell_inner_radius_m > 0.0)) throw ConfigError("layout.cell_inner_radius_m: must be > 0");
    if (!(user_density_per_km2 > 0.0)) throw ConfigError("layout.user_density_per_km2: must be > 0");
    if (!(exclusion_radius_m > 0.0)) throw ConfigError("layout.exclusion_radius_m: must be > 0");
    if (!(exclusion_radius_m < cell_inner_radius_m))
        throw ConfigError("layout.exclusion_radius_m: must be smaller than the inner radius");
    if (!(shadowing_sigma_db >= 0.0)) throw ConfigError("layout.shadowing_sigma_db: must be >= 0");
    if (!std::isfinite(cluster_threshold_db))
        throw ConfigError("layout.cluster_threshold_db: must be finite");
    if (fixed_user_count && *fixed_user_count < 1)
        throw ConfigError("layout.fixed_user_count: must be >= 1");
}

namespace {

Point rotate(Point p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

}  // namespace

HexLayout::HexLayout(const LayoutConfig& cfg)
    : apothem_(cfg.cell_inner_radius_m), circumradius_(2.0 * cfg.cell_inner_radius_m / std::sqrt(3.0)) {
    constexpr double kSixty = std::numbers::pi / 3.0;
    centers_.push_back({0.0, 0.0});
    if (cfg.num_cells == 7) {
        // Neighbour centres of a flat-top hexagon sit at 2*apothem along 30 + 60k degrees.
        const Point first = rotate({2.0 * apothem_, 0.0}, kSixty / 2.0);
        for (int k = 0; k < 6; ++k) centers_.push_back(rotate(first, k * kSixty));
        // 2u + v on the hex lattice basis; |t| = sqrt(21) * circumradius.
        const Point t0{3.0 * circumradius_, 2.0 * std::sqrt(3.0) * circumradius_};
        for (int k = 0; k < 6; ++k) translations_.push_back(rotate(t0, k * kSixty));
    }
}

double HexLayout::area_km2() const {
    const double a_km = apothem_ / 1000.0;
    return static_cast<double>(num_cells()) * 2.0 * std::sqrt(3.0) * a_km * a_km;
}

bool HexLayout::in_cell(Point p, int cell) const {
    const Point d = p - centers_.at(cell);
    const double ax = std::abs(d.x);
    const double ay = std::abs(d.y);
    return ay <= apothem_ && std::sqrt(3.0) * ax + ay <= std::sqrt(3.0) * circumradius_;
}

Point HexLayout::sample_in_cell(int cell, Rng& rng) const {
    std::uniform_real_distribution<double> ux(-circumradius_, circumradius_);
    std::uniform_real_distribution<double> uy(-apothem_, apothem_);
    const Point c = centers_.at(cell);
    for (;;) {
        const Point p{c.x + ux(rng), c.y + uy(rng)};
        if (in_cell(p, cell)) return p;
    }
}

Point HexLayout::sample_in_region(Rng& rng) const {
    std::uniform_int_distribution<int> pick(0, num_cells() - 1);
    return sample_in_cell(pick(rng), rng);
}

double HexLayout::wrap_distance(Point a, Point b) const {
    double best = norm(a - b);
    for (const Point& t : translations_) best = std::min(best, norm(a - (b + t)));
    return best;
}

double wrap_distance(Point a, Point b, const LayoutConfig& cfg) { return HexLayout(cfg).wrap_distance(a, b); }

ClusterSets form_clusters(const Eigen::MatrixXd& gains, double threshold) {
    const int num_rrh = static_cast<int>(gains.rows());
    const int num_users = static_cast<int>(gains.cols());
    ClusterSets sets;
    sets.clusters.resize(num_users);
    sets.served.resize(num_rrh);
    for (int u = 0; u < num_users; ++u) {
        auto& c = sets.clusters[u];
        for (int r = 0; r < num_rrh; ++r)
            if (gains(r, u) >= threshold) c.push_back(r);
        if (c.empty() && num_rrh > 0) {
            Eigen::Index best = 0;
            gains.col(u).maxCoeff(&best);
            c.push_back(static_cast<int>(best));
        }
        for (int r : c) sets.served[r].push_back(u);
    }
    return sets;
}

int NetworkRealization::slot_of(int r, int u) const {
    const auto& e = served.at(r);
    auto it = std::lower_bound(e.begin(), e.end(), u);
    return (it != e.end() && *it == u) ? static_cast<int>(it - e.begin()) : -1;
}

NetworkRealization generate_network(const LayoutConfig& cfg) {
    cfg.validate();
    const HexLayout layout(cfg);
    Rng rng = derive_stream(cfg.seed, {static_cast<std::uint64_t>(StreamTag::Geometry)});

    NetworkRealization net;
    net.antennas = cfg.antennas_per_rrh;
    for (int c = 0; c < layout.num_cells(); ++c)
        for (int n = 0; n < cfg.rrh_per_cell; ++n) net.rrh_positions.push_back(layout.sample_in_cell(c, rng));

    int num_users = 0;
    if (cfg.fixed_user_count) {
        num_users = *cfg.fixed_user_count;
    } else {
        std::poisson_distribution<int> count(cfg.user_density_per_km2 * layout.area_km2());
        num_users = std::max(1, count(rng));
    }

    net.user_positions.reserve(num_users);
    while (static_cast<int>(net.user_positions.size()) < num_users) {
        const Point p = layout.sample_in_region(rng);
        const bool clear = std::all_of(net.rrh_positions.begin(), net.rrh_positions.end(), [&](Point r) {
            return layout.wrap_distance(p, r) >= cfg.exclusion_radius_m;
        });
        if (clear) net.user_positions.push_back(p);
    }

    const int nb = net.num_rrh();
    net.distance_km.resize(nb, num_users);
    net.shadowing.resize(nb, num_users);
    net.large_scale_gain.resize(nb, num_users);
    std::normal_distribution<double> shadow_db(0.0, cfg.shadowing_sigma_db);
    for (int u = 0; u < num_users; ++u) {
        for (int r = 0; r < nb; ++r) {
            const double d = layout.wrap_distance(net.rrh_positions[r], net.user_positions[u]) / 1000.0;
            net.distance_km(r, u) = d;
            net.shadowing(r, u) = db_to_linear(shadow_db(rng));
            net.large_scale_gain(r, u) = net.shadowing(r, u) * path_loss_linear(d);
        }
    }

    auto sets = form_clusters(net.large_scale_gain, cfg.cluster_threshold());
    net.clusters = std::move(sets.clusters);
    net.served = std::move(sets.served);
    return net;
}

nlohmann::json to_json(const NetworkRealization& net) {
    using nlohmann::json;
    json j;
    j["antennas"] = net.antennas;
    json rrh = json::array();
    for (auto p : net.rrh_positions) rrh.push_back({p.x, p.y});
    json users = json::array();
    for (auto p : net.user_positions) users.push_back({p.x, p.y});
    j["rrh_positions_m"] = std::move(rrh);
    j["user_positions_m"] = std::move(users);
    json gains = json::array();
    json shadow = json::array();
    for (int r = 0; r < net.num_rrh(); ++r) {
        json g = json::array();
        json s = json::array();
        for (int u = 0; u < net.num_users(); ++u) {
            g.push_back(linear_to_db(net.large_scale_gain(r, u)));
            s.push_back(linear_to_db(net.shadowing(r, u)));
        }
        gains.push_back(std::move(g));
        shadow.push_back(std::move(s));
    }
    j["large_scale_gain_db"] = std::move(gains);
    j["shadowing_db"] = std::move(shadow);
    j["clusters"] = net.clusters;
    j["served"] = net.served;
    return j;
}

}  // namespace cfsched
