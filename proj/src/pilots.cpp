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

#include "cfsched/pilots.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

namespace cfsched {

std::vector<int> MergeTree::leaves(int node) const {
    std::vector<int> out;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        if (n < num_leaves) {
            out.push_back(n);
        } else {
            const auto& c = children.at(n - num_leaves);
            stack.push_back(c[1]);
            stack.push_back(c[0]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Condensed symmetric matrix without the diagonal.
class Condensed {
public:
    explicit Condensed(int n) : n_(n), data_(static_cast<std::size_t>(n) * (n - 1) / 2) {}
    double& operator()(int i, int j) {
        if (i > j) std::swap(i, j);
        return data_[index(i, j)];
    }

private:
    std::size_t index(int i, int j) const {
        const auto ii = static_cast<std::size_t>(i);
        return ii * (2 * static_cast<std::size_t>(n_) - ii - 1) / 2 + static_cast<std::size_t>(j - i - 1);
    }
    int n_;
    std::vector<double> data_;
};

}  // namespace

MergeTree ward_tree(std::span<const Point> points, const HexLayout* layout) {
    const int n = static_cast<int>(points.size());
    MergeTree tree;
    tree.num_leaves = n;
    tree.sizes.assign(n, 1);
    if (n <= 1) return tree;

    // Lance-Williams on squared distances; the Ward recurrence is exact for them.
    Condensed d(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dist = layout ? layout->wrap_distance(points[i], points[j]) : norm(points[i] - points[j]);
            d(i, j) = dist * dist;
        }

    std::vector<char> active(n, 1);
    std::vector<int> node_of(n);  // slot -> tree node id
    std::vector<int> count(n, 1);
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<int> chain;
    chain.reserve(n);

    for (int merges = 0; merges < n - 1; ++merges) {
        for (;;) {
            if (chain.empty()) {
                chain.push_back(static_cast<int>(std::find(active.begin(), active.end(), 1) - active.begin()));
            }
            const int a = chain.back();
            const int prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
            int b = prev;
            double best = prev >= 0 ? d(a, prev) : std::numeric_limits<double>::infinity();
            for (int k = 0; k < n; ++k) {
                if (!active[k] || k == a) continue;
                const double v = d(a, k);
                if (v < best) {  // ties keep the previous chain element, else the lowest index
                    best = v;
                    b = k;
                }
            }
            if (b == prev) {
                chain.pop_back();
                chain.pop_back();
                const int lo = std::min(a, b);
                const int hi = std::max(a, b);
                const double na = count[lo];
                const double nb = count[hi];
                for (int k = 0; k < n; ++k) {
                    if (!active[k] || k == lo || k == hi) continue;
                    const double nk = count[k];
                    d(lo, k) = ((na + nk) * d(lo, k) + (nb + nk) * d(hi, k) - nk * best) / (na + nb + nk);
                }
                const int left = std::min(node_of[lo], node_of[hi]);
                const int right = std::max(node_of[lo], node_of[hi]);
                tree.children.push_back({left, right});
                tree.heights.push_back(best);
                count[lo] += count[hi];
                tree.sizes.push_back(count[lo]);
                node_of[lo] = n + static_cast<int>(tree.children.size()) - 1;
                active[hi] = 0;
                break;
            }
            chain.push_back(b);
        }
    }
    return tree;
}

std::vector<std::vector<int>> cut_groups(const MergeTree& tree, int max_size) {
    std::vector<std::vector<int>> groups;
    if (tree.num_leaves == 0) return groups;
    std::vector<int> stack{tree.root()};
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (tree.size(node) <= max_size) {
            groups.push_back(tree.leaves(node));
            continue;
        }
        const auto& c = tree.children.at(node - tree.num_leaves);
        stack.push_back(c[1]);
        stack.push_back(c[0]);
    }
    return groups;
}

std::vector<std::vector<int>> hac_group(std::span<const Point> users, int tau_p, const HexLayout* layout) {
    if (tau_p < 1) throw ContractError("hac_group: tau_p must be >= 1");
    return cut_groups(ward_tree(users, layout), tau_p);
}

Eigen::MatrixXcd dft_pilots(int tau_p) {
    Eigen::MatrixXcd phi(tau_p, tau_p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tau_p));
    for (int k = 0; k < tau_p; ++k)
        for (int n = 0; n < tau_p; ++n) {
            // Reduce k*n modulo tau_p first so the phase stays exact for large products.
            const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * n) % tau_p) / tau_p;
            phi(k, n) = std::polar(scale, phase);
        }
    return phi;
}

PilotAssignment assign_pilots(const std::vector<std::vector<int>>& groups, int num_users, int tau_p, Rng& rng) {
    if (tau_p < 1) throw ContractError("assign_pilots: tau_p must be >= 1");
    PilotAssignment out;
    out.tau_p = tau_p;
    out.pilot_index.assign(num_users, -1);
    out.pilot_matrix = dft_pilots(tau_p);

    std::vector<int> alphabet(tau_p);
    for (const auto& g : groups) {
        if (static_cast<int>(g.size()) > tau_p)
            throw ContractError("assign_pilots: group of " + std::to_string(g.size()) + " users exceeds tau_p = " +
                                std::to_string(tau_p));
        std::iota(alphabet.begin(), alphabet.end(), 0);
        std::shuffle(alphabet.begin(), alphabet.end(), rng);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const int u = g[i];
            if (u < 0 || u >= num_users || out.pilot_index[u] != -1)
                throw ContractError("assign_pilots: groups must partition the users");
            out.pilot_index[u] = alphabet[i];
        }
    }
    if (std::find(out.pilot_index.begin(), out.pilot_index.end(), -1) != out.pilot_index.end())
        throw ContractError("assign_pilots: groups must partition the users");

    std::vector<std::vector<int>> by_pilot(tau_p);
    for (int u = 0; u < num_users; ++u) by_pilot[out.pilot_index[u]].push_back(u);
    out.copilot_sets.resize(num_users);
    for (int u = 0; u < num_users; ++u) out.copilot_sets[u] = by_pilot[out.pilot_index[u]];
    return out;
}

nlohmann::json to_json(const PilotAssignment& pilots) {
    return nlohmann::json{{"tau_p", pilots.tau_p}, {"pilot_index", pilots.pilot_index}};
}

}  // namespace cfsched
