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

#ifndef fdrelay_channel_H
#define fdrelay_channel_H

#include "common.hpp"
#include "rng.hpp"

namespace fdr
{

// Link powers, noise variances, distortion coefficients and antenna counts.
// kappa and beta are the linear (not dB) transmit/receive distortion ratios.
struct SystemParams
{
    double ps_max = 1.0;     // source power cap [W]
    double pr_max = 1.0;     // relay power cap [W]
    double sigma2_nr = 1e-4; // relay noise variance [W]
    double sigma2_nd = 1e-4; // destination noise variance [W]
    double kappa = 1e-4;     // transmit-chain distortion ratio
    double beta = 1e-4;      // receive-chain distortion ratio
    arma::uword mt = 4;      // relay transmit antennas
    arma::uword mr = 4;      // relay receive antennas
    arma::uword md = 4;      // destination antennas

    void validate() const;

    // Cap on tr(Q): the radiated power is (1+kappa) tr(Q).
    double pr_cap_undistorted() const { return pr_max / (1.0 + kappa); }
};

// One flat-fading realization of all four links.
struct ChannelSet
{
    arma::cx_vec h_sr; // source -> relay, length mr
    arma::cx_mat h_rd; // relay -> destination, md x mt
    arma::cx_vec h_sd; // source -> destination, length md
    arma::cx_mat h_rr; // relay self-interference, mr x mt

    void validate(const SystemParams &p) const;
};

// Fading model: Rayleigh links with per-entry power rho_*, Rician
// self-interference around sqrt(rho_rr K/(1+K)) H0 with CN(0, 1/(1+K))
// scattering.
struct FadingConfig
{
    double rho_sr = 1e-3;
    double rho_rd = 1e-3;
    double rho_sd = 1e-6;
    double rho_rr = 1.0;
    double k_rician = 10.0;
    arma::cx_mat h0; // deterministic mean shape; empty selects all-ones

    void validate() const;
};

// I.i.d. CN(0, rho) entries.
arma::cx_mat gen_rayleigh(RngStream &rng, double rho, arma::uword rows, arma::uword cols);

// Rician self-interference draw per the FadingConfig statistics.
arma::cx_mat gen_rician(RngStream &rng, const FadingConfig &cfg, arma::uword rows, arma::uword cols);

// Path gain 0.1 / d^2 for a link of length d.
double pathloss_from_distance(double d);

// Draws all four links from one stream. The draw order (h_sr, h_rd, h_sd,
// h_rr) is fixed so a (seed, realization) key fully determines the channels.
ChannelSet draw_channels(RngStream &rng, const SystemParams &params, const FadingConfig &fading);

} // namespace fdr

#endif
