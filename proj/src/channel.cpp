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

#include "channel.hpp"

namespace fdr
{

void SystemParams::validate() const
{
    if (ps_max <= 0.0 || pr_max <= 0.0)
        throw std::invalid_argument("SystemParams: power caps must be positive");
    if (sigma2_nr <= 0.0 || sigma2_nd <= 0.0)
        throw std::invalid_argument("SystemParams: noise variances must be positive");
    if (kappa < 0.0 || beta < 0.0)
        throw std::invalid_argument("SystemParams: distortion coefficients must be non-negative");
    if (mt < 1 || mr < 1 || md < 1)
        throw std::invalid_argument("SystemParams: antenna counts must be >= 1");
}

void ChannelSet::validate(const SystemParams &p) const
{
    if (h_sr.n_elem != p.mr || h_sd.n_elem != p.md || h_rd.n_rows != p.md || h_rd.n_cols != p.mt ||
        h_rr.n_rows != p.mr || h_rr.n_cols != p.mt)
        throw std::invalid_argument("ChannelSet: dimensions inconsistent with SystemParams");
    if (!h_sr.is_finite() || !h_rd.is_finite() || !h_sd.is_finite() || !h_rr.is_finite())
        throw std::invalid_argument("ChannelSet: channels must be finite");
}

void FadingConfig::validate() const
{
    if (rho_sr <= 0.0 || rho_rd <= 0.0 || rho_sd <= 0.0 || rho_rr <= 0.0)
        throw std::invalid_argument("FadingConfig: path gains must be positive");
    if (k_rician < 0.0)
        throw std::invalid_argument("FadingConfig: Rician factor must be >= 0");
}

arma::cx_mat gen_rayleigh(RngStream &rng, double rho, arma::uword rows, arma::uword cols)
{
    if (rho <= 0.0)
        throw std::invalid_argument("gen_rayleigh: path gain must be positive");
    return std::sqrt(rho) * rng.cgaussian_matrix(rows, cols);
}

arma::cx_mat gen_rician(RngStream &rng, const FadingConfig &cfg, arma::uword rows, arma::uword cols)
{
    if (cfg.k_rician < 0.0)
        throw std::invalid_argument("gen_rician: Rician factor must be >= 0");
    arma::cx_mat mean(rows, cols, arma::fill::ones);
    if (!cfg.h0.is_empty())
    {
        if (cfg.h0.n_rows != rows || cfg.h0.n_cols != cols)
            throw std::invalid_argument("gen_rician: H0 shape does not match the requested draw");
        mean = cfg.h0;
    }
    const double k = cfg.k_rician;
    const double los_scale = std::sqrt(cfg.rho_rr * k / (1.0 + k));
    const double nlos_scale = std::sqrt(1.0 / (1.0 + k));
    return los_scale * mean + nlos_scale * rng.cgaussian_matrix(rows, cols);
}

double pathloss_from_distance(double d)
{
    if (d <= 0.0)
        throw std::invalid_argument("pathloss_from_distance: distance must be positive");
    return 0.1 / (d * d);
}

ChannelSet draw_channels(RngStream &rng, const SystemParams &params, const FadingConfig &fading)
{
    params.validate();
    fading.validate();
    ChannelSet ch;
    ch.h_sr = gen_rayleigh(rng, fading.rho_sr, params.mr, 1);
    ch.h_rd = gen_rayleigh(rng, fading.rho_rd, params.md, params.mt);
    ch.h_sd = gen_rayleigh(rng, fading.rho_sd, params.md, 1);
    ch.h_rr = gen_rician(rng, fading, params.mr, params.mt);
    return ch;
}

} // namespace fdr
