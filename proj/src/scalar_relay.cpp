// SPDX-License-Identifier: Apache-2.0
//
// fdrelay - transceiver design toolkit for full-duplex AF MIMO relays
// Copyright (C) 2026 fdrelay developers
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

#include "scalar_relay.hpp"

#include <algorithm>
#include <limits>

namespace fdr
{

void ScalarNode::validate() const
{
    if (h_rd.empty() || w_n.size() != h_rd.size())
        throw std::invalid_argument("ScalarNode: need matching per-destination channels and noise powers");
    if (ps <= 0.0 || p_relay <= 0.0 || relay_noise < 0.0)
        throw std::invalid_argument("ScalarNode: powers must be positive");
    if (beta < 0.0 || gamma < 0.0 || zeta_err < 0.0)
        throw std::invalid_argument("ScalarNode: ratios and error radius must be >= 0");
    for (std::size_t n = 0; n < h_rd.size(); ++n)
    {
        if (w_n[n] <= 0.0 || std::abs(h_rd[n]) == 0.0)
            throw std::invalid_argument("ScalarNode: destination links need positive noise and channel");
    }
}

double ScalarNode::ell() const
{
    double out = 0.0;
    for (std::size_t n = 0; n < h_rd.size(); ++n)
        out = std::max(out, w_n[n] / std::norm(h_rd[n]));
    return out;
}

cxd worst_delta(const ScalarNode &node)
{
    if (node.zeta_err == 0.0)
        return {0.0, 0.0};
    const double mag = std::abs(node.h_rr_est);
    if (mag == 0.0)
        return {node.zeta_err, 0.0}; // phase free: b depends only on |delta|
    return node.zeta_err * node.h_rr_est / mag;
}

double loop_coeff(const ScalarNode &node)
{
    const cxd delta = worst_delta(node);
    return std::norm(node.h_rr_est + delta) * node.eta() + (node.gamma + 1.0) * std::norm(delta);
}

double senr(const ScalarNode &node, double a_tilde)
{
    if (a_tilde < 0.0)
        throw std::invalid_argument("senr: gain must be >= 0");
    if (a_tilde == 0.0)
        return 0.0;
    const double b = loop_coeff(node);
    if (b > 0.0 && a_tilde >= 1.0 / b)
        throw std::invalid_argument("senr: gain at or beyond the loop pole");

    const double sig = node.ps * std::norm(node.h_sr);
    const double den = (1.0 + node.eta()) * a_tilde * (sig + node.relay_noise) / (1.0 - a_tilde * b) -
                       sig * a_tilde + node.ell();
    return sig * a_tilde / den;
}

double relay_tx_power(const ScalarNode &node, double a_tilde)
{
    const double b = loop_coeff(node);
    if (b > 0.0 && a_tilde >= 1.0 / b)
        return std::numeric_limits<double>::infinity();
    const double sig = node.ps * std::norm(node.h_sr);
    return (node.eta() + 1.0) * a_tilde * (sig + node.relay_noise) / (1.0 - a_tilde * b);
}

double a_max(const ScalarNode &node)
{
    const double b = loop_coeff(node);
    const double sig = node.ps * std::norm(node.h_sr);
    return node.p_relay / ((1.0 + node.eta()) * (sig + node.relay_noise) + node.p_relay * b);
}

namespace
{

// Derivative-sign bisection over (0, pole); fallback for the degenerate
// |c - b| -> 0 case where the stationarity quadratic loses its leading term.
double stationary_by_bisection(const ScalarNode &node, double pole)
{
    const double eps = 1e-12 * pole;
    auto rising = [&](double a) {
        const double h = std::max(1e-9 * a, 1e-18);
        return senr(node, std::min(a + h, pole * (1.0 - 1e-12))) - senr(node, a - h) > 0.0;
    };
    double lo = eps;
    double hi = pole * (1.0 - 1e-9);
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * pole; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (rising(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ScalarSolution optimal_gain(const ScalarNode &node)
{
    node.validate();
    const double b = loop_coeff(node);
    const double cap = a_max(node);

    ScalarSolution sol;
    if (b == 0.0)
    {
        // Distortion free: SENR is monotone increasing, amplify to the cap.
        sol.a_tilde = cap;
        sol.saturated = true;
        sol.senr = senr(node, cap);
        return sol;
    }

    const double ell = node.ell();
    if (ell <= 0.0)
        throw std::invalid_argument("optimal_gain: destination noise term must be positive");
    const double c = (1.0 + node.eta()) * (node.ps * std::norm(node.h_sr) + node.relay_noise) / ell;

    double r_star;
    if (std::abs(c - b) < 1e-9 * std::max(c, b))
    {
        r_star = stationary_by_bisection(node, 1.0 / b);
    }
    else
    {
        const double r1 = -1.0 / (c - b) + std::sqrt(c / b) / std::abs(c - b);
        const double r2 = -1.0 / (c - b) - std::sqrt(c / b) / std::abs(c - b);
        r_star = std::numeric_limits<double>::infinity();
        for (const double r : {r1, r2})
            if (r >= 0.0 && r < r_star)
                r_star = r;
    }

    sol.a_tilde = std::min(r_star, cap);
    sol.saturated = r_star >= cap;
    sol.senr = senr(node, sol.a_tilde);
    return sol;
}

std::pair<std::size_t, ScalarSolution> select_relay(const std::vector<ScalarNode> &nodes)
{
    if (nodes.empty())
        throw std::invalid_argument("select_relay: node list is empty");

    std::size_t best_idx = 0;
    ScalarSolution best = optimal_gain(nodes[0]);
    for (std::size_t k = 1; k < nodes.size(); ++k)
    {
        const ScalarSolution sol = optimal_gain(nodes[k]);
        if (sol.senr > best.senr)
        {
            best = sol;
            best_idx = k;
        }
    }
    return {best_idx, best};
}

} // namespace fdr
