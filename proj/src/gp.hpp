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

#ifndef fdrelay_gp_H
#define fdrelay_gp_H

#include "relay_model.hpp"

#include <vector>

namespace fdr
{

// Gradient-projection SDNR maximizer. Gradients are Wirtinger derivatives
// with respect to conj(W); a step in that direction is the steepest ascent of
// the real-valued SDNR.

struct GpConfig
{
    double sigma_armijo = 0.1; // acceptance fraction
    double nu = 0.5;           // backtracking factor
    double delta = 1.0;        // gradient step before projection
    double c1 = 1e-6;          // relative SDNR improvement threshold
    arma::uword inits = 10;    // initializations (first one is MRC/MRT-seeded)
    arma::uword max_iters = 400;
    arma::uword armijo_max_backtracks = 40;
    arma::uword sample_every = 50; // iterate snapshots for gradient audits
};

// d P_des / d conj(W); closed form.
arma::cx_mat grad_pdes(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch);

// d P_err / d conj(W) through the loop fixed point; index-free assembly.
arma::cx_mat grad_perr(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch,
                       const LoopKernels &k);

// Quotient rule on P_des / P_err.
arma::cx_mat grad_sdnr(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const SystemParams &params,
                       const ChannelSet &ch, const LoopKernels &k);

// Same gradients assembled through the explicit S_T / S_K selection-matrix
// products; dense and O(M^8), intended for cross-validation at small M.
arma::cx_mat grad_pdes_selection(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch);
arma::cx_mat grad_perr_selection(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch,
                                 const LoopKernels &k);

// Projects W onto the feasible set: Q is projected onto the PSD cone under
// the trace cap pr_max/(1+kappa), then W is rebuilt so that its fixed-point
// covariance equals the projected Q.
arma::cx_mat project_design(const arma::cx_mat &w_old, const SystemParams &params, const ChannelSet &ch,
                            double ps);

struct GpResult
{
    RelayDesign design;
    PerformanceReport report;
    std::vector<std::vector<double>> sdnr_traces; // one trace per initialization
    std::vector<arma::cx_mat> sampled_iterates;   // every sample_every-th accepted W
    std::vector<double> sampled_ps;
    arma::uword best_init = 0;
    arma::uword total_iterations = 0;
};

GpResult gp_optimize(const SystemParams &params, const ChannelSet &ch, const GpConfig &cfg, RngStream &rng);

} // namespace fdr

#endif
