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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "cfsched/netgen.hpp"
#include "cfsched/rng.hpp"

namespace cfsched {

/// Binary merge tree from agglomerative clustering. Leaves are 0..n-1, internal
/// node n+k is the k-th merge.
struct MergeTree {
    int num_leaves = 0;
    std::vector<std::array<int, 2>> children;  // per internal node
    std::vector<double> heights;               // Lance-Williams dissimilarity at merge
    std::vector<int> sizes;                    // per node (leaves first)

    int root() const { return num_leaves == 0 ? -1 : num_leaves + static_cast<int>(children.size()) - 1; }
    int size(int node) const { return sizes.at(node); }
    std::vector<int> leaves(int node) const;
};

/// Ward minimum-variance agglomeration on (optionally wrapped) Euclidean distance.
/// Uses the nearest-neighbour chain; ties resolve towards the lowest cluster index.
MergeTree ward_tree(std::span<const Point> points, const HexLayout* layout = nullptr);

/// Depth-first from the root, emit a node as a group as soon as its size <= max_size.
std::vector<std::vector<int>> cut_groups(const MergeTree& tree, int max_size);

/// Groups of users of size <= tau_p, ready for orthogonal pilot assignment.
std::vector<std::vector<int>> hac_group(std::span<const Point> users, int tau_p, const HexLayout* layout = nullptr);

struct PilotAssignment {
    int tau_p = 1;
    std::vector<int> pilot_index;                // per user, 0..tau_p-1
    Eigen::MatrixXcd pilot_matrix;               // tau_p x tau_p, rows are unit-norm sequences
    std::vector<std::vector<int>> copilot_sets;  // U_u, includes u, ascending

    int num_users() const { return static_cast<int>(pilot_index.size()); }
    Eigen::RowVectorXcd sequence(int u) const { return pilot_matrix.row(pilot_index.at(u)); }
};

/// Unitary DFT matrix; its rows are orthonormal pilot sequences.
Eigen::MatrixXcd dft_pilots(int tau_p);

/// Random injection of pilot indices inside each group. Throws ContractError if a
/// group is larger than tau_p or the groups do not cover 0..num_users-1 exactly once.
PilotAssignment assign_pilots(const std::vector<std::vector<int>>& groups, int num_users, int tau_p, Rng& rng);

nlohmann::json to_json(const PilotAssignment& pilots);

}  // namespace cfsched
