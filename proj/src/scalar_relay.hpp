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

#ifndef fdrelay_scalar_relay_H
#define fdrelay_scalar_relay_H

#include "common.hpp"

#include <vector>

namespace fdr
{

// Single-antenna robust full-duplex relay selection: the self-interference
// channel is known up to an estimation error inside a disk of radius
// zeta_err, the SENR is evaluated at the worst error and the amplification
// gain a_tilde = |a|^2 is optimized in closed form.

struct ScalarNode
{
    cxd h_sr{0.0, 0.0};
    cxd h_rr_est{0.0, 0.0};
    double zeta_err = 0.0;      // |delta| <= zeta_err
    std::vector<cxd> h_rd;      // per-destination channels
    std::vector<double> w_n;    // per-destination noise powers
    double relay_noise = 0.0;   // M_k
    double beta = 0.0;          // receive-chain distortion ratio
    double gamma = 0.0;         // transmit-chain distortion ratio
    double p_relay = 1.0;       // relay power cap
    double ps = 1.0;            // source power

    void validate() const;

    double eta() const { return gamma + beta + gamma * beta; }

    // ell_k = max_n W^(n) / |h_rd^(n)|^2: the binding destination noise.
    double ell() const;
};

struct ScalarSolution
{
    double a_tilde = 0.0;
    double senr = 0.0;
    bool saturated = false; // optimum hit the power cap a_max
};

// Worst-case estimation error: radius zeta_err, phase aligned with the
// estimate (arbitrary phase when the estimate is zero).
cxd worst_delta(const ScalarNode &node);

// Effective loop coefficient at the worst-case error:
// b = |h_est + delta*|^2 eta + (gamma + 1) |delta*|^2.
double loop_coeff(const ScalarNode &node);

// Worst-case min-over-destinations SENR at gain a_tilde; requires
// a_tilde < 1 / b (the loop pole).
double senr(const ScalarNode &node, double a_tilde);

// Relay transmit power at gain a_tilde (worst-case error).
double relay_tx_power(const ScalarNode &node, double a_tilde);

// Largest gain meeting the relay power cap; strictly below the loop pole.
double a_max(const ScalarNode &node);

// Closed-form SENR maximizer over [0, a_max].
ScalarSolution optimal_gain(const ScalarNode &node);

// Max-min selection: the node whose optimal worst-case SENR is largest
// (ties broken by lowest index).
std::pair<std::size_t, ScalarSolution> select_relay(const std::vector<ScalarNode> &nodes);

} // namespace fdr

#endif
