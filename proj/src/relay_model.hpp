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

#ifndef fdrelay_relay_model_H
#define fdrelay_relay_model_H

#include "channel.hpp"
#include "matkernel.hpp"
#include "rng.hpp"

namespace fdr
{

// Closed-form analysis of the relay distortion loop. The undistorted transmit
// covariance Q = E{u_out u_out^H} satisfies the fixed point Q = W R(Q) W^H;
// in vectorized form vec(Q) = (I - (W* kron W) C)^{-1} (W* kron W) c with the
// loop kernels C and c below. The loop is stable iff the spectral radius of
// (W* kron W) C stays below one.

struct LoopKernels
{
    arma::cx_mat loop;      // C, maps vec(Q) to the loop part of vec(R(Q)), mr^2 x mt^2
    arma::cx_vec drive;     // c, vec of the distortion-inflated noise+signal input, mr^2
    arma::cx_mat base;      // P_s h_sr h_sr^H + sigma2_nr I
    arma::mat sel_diag_mt;  // S_D^{mt}
    arma::mat sel_diag_mr;  // S_D^{mr}
    double ps_used = 0.0;
    double kappa = 0.0;
    double beta = 0.0;
    arma::uword mt = 0;
    arma::uword mr = 0;
};

// A candidate amplify-and-forward solution.
struct RelayDesign
{
    arma::cx_mat w; // relay amplification, mt x mr
    arma::cx_vec z; // destination receive filter, md
    double ps = 0.0;
};

struct PerformanceReport
{
    arma::cx_mat q;       // undistorted relay transmit covariance
    arma::cx_mat tx_cov;  // Q + kappa diag(Q)
    double p_des = 0.0;
    double p_tot = 0.0;
    double p_err = 0.0;
    double sdnr = 0.0;
    double rate = 0.0;        // log2(1 + sdnr) [bits/s/Hz]
    double relay_power = 0.0; // tr(tx_cov)
    double loop_spectral_radius = 0.0;
};

// Margin kept from the loop-divergence boundary; designs with spectral radius
// above 1 - stability_margin are rejected rather than inverted.
inline constexpr double stability_margin = 1e-9;

LoopKernels build_kernels(const SystemParams &params, const ChannelSet &ch, double ps);

double loop_spectral_radius(const arma::cx_mat &w, const LoopKernels &k);

// Q from the direct vectorized inverse; throws instability_error when the
// loop diverges.
arma::cx_mat relay_q(const arma::cx_mat &w, const LoopKernels &k);

// Picard iteration Q <- W R(Q) W^H from Q = 0; independent route to the same
// fixed point, used for cross-validation.
arma::cx_mat relay_q_picard(const arma::cx_mat &w, const SystemParams &params, const ChannelSet &ch, double ps,
                            double rel_tol = 1e-14, arma::uword max_iters = 100000);

// R(Q): undistorted receive covariance as seen through the amplifier.
arma::cx_mat r_op(const arma::cx_mat &q, const SystemParams &params, const ChannelSet &ch, double ps);

arma::cx_mat tx_covariance(const arma::cx_mat &q, double kappa);

PerformanceReport performance(const RelayDesign &d, const SystemParams &params, const ChannelSet &ch);

// Same report when Q is already known (avoids recomputing the fixed point).
PerformanceReport performance_with_q(const RelayDesign &d, const arma::cx_mat &q, const SystemParams &params,
                                     const ChannelSet &ch);

// MMSE receive filter; maximizes the SDNR over z for fixed (W, P_s).
arma::cx_vec mmse_z(const arma::cx_mat &w, double ps, const arma::cx_mat &q, const SystemParams &params,
                    const ChannelSet &ch);

// Largest feasible source power for a fixed W: the relay transmit power is
// affine in P_s, so the cap equation is solved exactly from two evaluations.
double optimal_ps(const arma::cx_mat &w, const SystemParams &params, const ChannelSet &ch);

// Symbol-level oracle: runs the relay loop with explicit distortion draws
// whose per-antenna variance follows an exponential moving average of the
// instantaneous powers.
struct SimulationReport
{
    arma::cx_mat q_hat;
    double p_des_hat = 0.0;
    double p_tot_hat = 0.0;
    double p_err_hat = 0.0;
    double sdnr_hat = 0.0;
    arma::uword symbols_used = 0;
};

SimulationReport simulate_time_domain(const RelayDesign &d, const SystemParams &params, const ChannelSet &ch,
                                      arma::uword n_symbols, RngStream &rng, arma::uword warmup = 10000,
                                      double ema_decay = 0.999);

} // namespace fdr

#endif
