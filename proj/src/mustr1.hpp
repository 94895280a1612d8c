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

#ifndef fdrelay_mustr1_H
#define fdrelay_mustr1_H

#include "relay_model.hpp"

namespace fdr
{

// Multi-stage rank-1 relay amplification: W = sqrt(omega) w_tx w_rx^H with
// unit-norm spatial filters from generalized Rayleigh quotients and the
// scaling omega from a polynomial model of the SDNR and the relay power.

struct Rank1Design
{
    arma::cx_vec w_tx;
    arma::cx_vec w_rx;
    double omega = 0.0;
    arma::cx_vec z;

    arma::cx_mat w() const { return std::sqrt(omega) * w_tx * w_rx.t(); }
};

// Degree-K models f1(omega) ~ SDNR and f2(omega) ~ relay transmit power,
// built from iterated applications of the loop kernel. The stored a
// coefficients are the raw non-negative series terms; f1's denominator
// applies the -a_d correction to the linear term.
struct OmegaPolynomials
{
    double a_d = 0.0;
    double a0 = 0.0;
    arma::vec a_raw; // k = 1..K series coefficients of the interference power
    arma::vec b;     // k = 1..K series coefficients of the relay power

    arma::uword order() const { return a_raw.n_elem; }

    double f1(double omega) const
    {
        double denom = a0 - a_d * omega;
        double p = 1.0;
        for (arma::uword k = 0; k < a_raw.n_elem; ++k)
        {
            p *= omega;
            denom += a_raw(k) * p;
        }
        return (denom > 0.0) ? a_d * omega / denom : 0.0;
    }

    double f2(double omega) const
    {
        double power = 0.0;
        double p = 1.0;
        for (arma::uword k = 0; k < b.n_elem; ++k)
        {
            p *= omega;
            power += b(k) * p;
        }
        return power;
    }

    // Right-hand side of the stationarity condition a0 = sum (k-1) a_k w^k.
    double stationarity_rhs(double omega) const
    {
        double rhs = 0.0;
        double p = omega;
        for (arma::uword k = 1; k < a_raw.n_elem; ++k)
        {
            p *= omega;
            rhs += static_cast<double>(k) * a_raw(k) * p;
        }
        return rhs;
    }
};

// Stacked equivalent distortion channel seen from the relay transmitter;
// ||H_Dtx w||^2 is the total distortion power injected by transmitting along
// w at full relay power (up to the P_r,max factor).
arma::cx_mat distortion_channel_tx(const SystemParams &params, const ChannelSet &ch);

// Variant with the destination filter folded in: H_rd enters as z^H H_rd.
arma::cx_mat distortion_channel_tx_projected(const SystemParams &params, const ChannelSet &ch,
                                             const arma::cx_vec &z);

arma::cx_vec design_wtx(const SystemParams &params, const ChannelSet &ch);
arma::cx_vec design_wtx_projected(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &z);

arma::cx_vec design_wrx(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx);

OmegaPolynomials omega_coeffs(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx,
                              const arma::cx_vec &w_rx, arma::uword order);
OmegaPolynomials omega_coeffs_projected(const SystemParams &params, const ChannelSet &ch,
                                        const arma::cx_vec &w_tx, const arma::cx_vec &w_rx,
                                        const arma::cx_vec &z, arma::uword order);

struct OmegaSolution
{
    double omega_star = 0.0;
    double omega_0 = 0.0;   // interior stationary point; +inf when none exists
    double omega_max = 0.0; // power-cap root of f2
};

OmegaSolution solve_omega(const OmegaPolynomials &p, double pr_max);

struct Rank1Result
{
    Rank1Design design;
    PerformanceReport report;
    arma::uword iterations = 1;
};

inline constexpr arma::uword default_poly_order = 5;

// Single-pass design (no alternation): w_tx, w_rx, omega, z at P_s = P_s,max.
Rank1Result mustr1(const SystemParams &params, const ChannelSet &ch, arma::uword order = default_poly_order);

// Alternating variant: the stages are repeated with the destination filter
// folded into the transmit-side quotients. Returns the best iterate seen
// (convergence is not guaranteed); iterate 1 is the plain MuStR1 design.
Rank1Result alt_mustr1(const SystemParams &params, const ChannelSet &ch,
                       arma::uword order = default_poly_order, arma::uword max_iters = 50,
                       double tol = 1e-6);

// Power-adjustment baseline: matched receive filter, dominant transmit
// direction of H_rd, omega from the same polynomial model.
Rank1Result mrc_mrt_design(const SystemParams &params, const ChannelSet &ch,
                           arma::uword order = default_poly_order);

} // namespace fdr

#endif
