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

#ifndef fdrelay_df_H
#define fdrelay_df_H

#include "relay_model.hpp"

namespace fdr
{

// Decode-and-forward benchmark: alternating receive/transmit filter updates
// around a bisection over the end-to-end SDNR target zeta, each step backed
// by a small semidefinite feasibility check with two trace constraints.

struct DfDesign
{
    arma::cx_vec v_in;  // relay receive filter
    arma::cx_vec v_out; // relay transmit beamformer, Q = v_out v_out^H
    arma::cx_vec z;     // destination filter
    double ps = 0.0;
    arma::cx_mat q;
};

struct DfLinkSdnrs
{
    double zeta_sr = 0.0;
    double zeta_rd = 0.0;
};

DfLinkSdnrs df_link_sdnrs(const DfDesign &d, const SystemParams &params, const ChannelSet &ch);

// Closed-form optimal filters for fixed (Q, P_s).
struct DfFilters
{
    arma::cx_vec z;
    arma::cx_vec v_in;
};

DfFilters df_filters(const arma::cx_mat &q, double ps, const SystemParams &params, const ChannelSet &ch);

// Feasibility of the SDNR target zeta over {Q >= 0, tr(Q) <= cap,
// 0 <= P_s <= P_s,max}: P_s is gridded (the constraints are affine in it) and
// the worst constraint slack is maximized over Q by projected supergradient
// ascent. Returned witnesses are re-verified against the constraints.
struct DfWitness
{
    bool feasible = false;
    arma::cx_mat q;
    double ps = 0.0;
    double slack = 0.0; // min constraint slack of the witness
};

DfWitness df_feasible(double zeta, const arma::cx_vec &v_in, const arma::cx_vec &z, const SystemParams &params,
                      const ChannelSet &ch, const arma::cx_mat *q_hint = nullptr, double ps_hint = -1.0);

// Constraint slacks (source-relay, relay-destination) of a candidate point.
std::pair<double, double> df_constraint_slacks(double zeta, const arma::cx_mat &q, double ps,
                                               const arma::cx_vec &v_in, const arma::cx_vec &z,
                                               const SystemParams &params, const ChannelSet &ch);

double df_zeta_upper_bound(const SystemParams &params, const ChannelSet &ch);

struct DfBisection
{
    double zeta = 0.0;
    arma::cx_mat q;
    double ps = 0.0;
    std::vector<double> zeta_trace; // accepted lower bounds, one per step
};

DfBisection df_bisect(const arma::cx_vec &v_in, const arma::cx_vec &z, const SystemParams &params,
                      const ChannelSet &ch, arma::uword c2, const arma::cx_mat *q_hint = nullptr,
                      double ps_hint = -1.0);

struct DfResult
{
    DfDesign design;
    double zeta = 0.0;
    double rate = 0.0;
    std::vector<double> outer_zetas;
    arma::uword iterations = 0;
};

DfResult df_optimize(const SystemParams &params, const ChannelSet &ch, arma::uword c_df = 10,
                     arma::uword c2 = 20, double c1 = 1e-4);

} // namespace fdr

#endif
