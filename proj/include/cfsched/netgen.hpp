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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "cfsched/rng.hpp"
#include "cfsched/units.hpp"

namespace cfsched {

/// COST231 Walfish-Ikegami loss at 1800 MHz, distance in km, result in dB
/// (negative: it is a gain). Throws std::domain_error for d <= 0.
double path_loss_db(double distance_km);

/// Linear gain of path_loss_db.
double path_loss_linear(double distance_km);

struct LayoutConfig {
    int num_cells = 7;              // 1 (no wrap) or 7 (wrapped cluster)
    int rrh_per_cell = 10;
    int antennas_per_rrh = 8;
    double cell_inner_radius_m = 500.0;
    double user_density_per_km2 = 200.0;
    double exclusion_radius_m = 20.0;
    double shadowing_sigma_db = 4.0;
    double cluster_threshold_db = -97.30537967046257;  // L(0.4 km)
    std::optional<int> fixed_user_count;               // overrides the Poisson draw
    std::uint64_t seed = 1;

    void validate() const;
    double cluster_threshold() const { return db_to_linear(cluster_threshold_db); }
};

/// Flat-top hexagonal layout of one cell or a seven-cell wrapped cluster.
class HexLayout {
public:
    explicit HexLayout(const LayoutConfig& cfg);

    int num_cells() const { return static_cast<int>(centers_.size()); }
    double apothem() const { return apothem_; }
    double circumradius() const { return circumradius_; }
    Point center(int cell) const { return centers_.at(cell); }
    std::span<const Point> translations() const { return translations_; }

    /// Area of the whole region in km^2.
    double area_km2() const;

    bool in_cell(Point p, int cell) const;
    Point sample_in_cell(int cell, Rng& rng) const;
    Point sample_in_region(Rng& rng) const;

    /// Minimum-image distance over the identity and the six cluster translations (m).
    double wrap_distance(Point a, Point b) const;

private:
    double apothem_;
    double circumradius_;
    std::vector<Point> centers_;
    std::vector<Point> translations_;  // empty for a single cell
};

double wrap_distance(Point a, Point b, const LayoutConfig& cfg);

struct ClusterSets {
    std::vector<std::vector<int>> clusters;  // C_u: RRH indices per user, ascending
    std::vector<std::vector<int>> served;    // E_r: user indices per RRH, ascending
};

/// C_u = {r : gain(r,u) >= threshold}; an empty C_u falls back to the strongest RRH.
ClusterSets form_clusters(const Eigen::MatrixXd& gains, double threshold);

struct NetworkRealization {
    std::vector<Point> rrh_positions;
    std::vector<Point> user_positions;
    Eigen::MatrixXd large_scale_gain;  // |B| x |U|, linear, shadowing * path loss
    Eigen::MatrixXd shadowing;         // |B| x |U|, linear
    Eigen::MatrixXd distance_km;       // |B| x |U|, wrapped
    std::vector<std::vector<int>> clusters;
    std::vector<std::vector<int>> served;
    int antennas = 1;

    int num_rrh() const { return static_cast<int>(rrh_positions.size()); }
    int num_users() const { return static_cast<int>(user_positions.size()); }

    /// Column index of user u inside served[r], or -1.
    int slot_of(int r, int u) const;
};

NetworkRealization generate_network(const LayoutConfig& cfg);

/// Positions in m, gains and shadowing in dB.
nlohmann::json to_json(const NetworkRealization& net);

}  // namespace cfsched
