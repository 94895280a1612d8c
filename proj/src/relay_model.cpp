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

#include "relay_model.hpp"

namespace fdr
{

LoopKernels build_kernels(const SystemParams &params, const ChannelSet &ch, double ps)
{
    if (ps < 0.0)
        throw std::invalid_argument("build_kernels: source power must be >= 0");
    params.validate();
    ch.validate(params);

    LoopKernels k;
    k.mt = params.mt;
    k.mr = params.mr;
    k.kappa = params.kappa;
    k.beta = params.beta;
    k.ps_used = ps;
    k.sel_diag_mt = selection_D(params.mt).entries;
    k.sel_diag_mr = selection_D(params.mr).entries;

    const arma::cx_mat sd_mt = arma::conv_to<arma::cx_mat>::from(k.sel_diag_mt);
    const arma::cx_mat sd_mr = arma::conv_to<arma::cx_mat>::from(k.sel_diag_mr);
    const arma::cx_mat hh = arma::kron(arma::conj(ch.h_rr), ch.h_rr);
    const arma::cx_mat eye_mt2 = arma::eye<arma::cx_mat>(params.mt * params.mt, params.mt * params.mt);
    const arma::cx_mat eye_mr2 = arma::eye<arma::cx_mat>(params.mr * params.mr, params.mr * params.mr);

    k.loop = params.beta * sd_mr * hh * (eye_mt2 + params.kappa * sd_mt) + params.kappa * hh * sd_mt;
    k.base = ps * ch.h_sr * ch.h_sr.t() +
             params.sigma2_nr * arma::eye<arma::cx_mat>(params.mr, params.mr);
    k.drive = (eye_mr2 + params.beta * sd_mr) * vectorize(k.base);
    return k;
}

namespace
{

arma::cx_mat loop_operator(const arma::cx_mat &w, const LoopKernels &k)
{
    return arma::kron(arma::conj(w), w) * k.loop;
}

} // namespace

double loop_spectral_radius(const arma::cx_mat &w, const LoopKernels &k)
{
    const arma::cx_mat op = loop_operator(w, k);
    if (arma::abs(op).max() == 0.0)
        return 0.0;
    arma::cx_vec eigs;
    if (!arma::eig_gen(eigs, op))
        throw std::runtime_error("loop_spectral_radius: eigensolver failed");
    return arma::abs(eigs).max();
}

arma::cx_mat relay_q(const arma::cx_mat &w, const LoopKernels &k)
{
    const double radius = loop_spectral_radius(w, k);
    if (radius >= 1.0 - stability_margin)
        throw instability_error("relay_q: distortion loop diverges (spectral radius " +
                                std::to_string(radius) + ")");

    const arma::cx_mat w_kron = arma::kron(arma::conj(w), w);
    const arma::uword n = k.mt * k.mt;
    const arma::cx_mat lhs = arma::eye<arma::cx_mat>(n, n) - w_kron * k.loop;
    arma::cx_vec q_vec;
    if (!arma::solve(q_vec, lhs, w_kron * k.drive))
        throw instability_error("relay_q: loop system is numerically singular");

    arma::cx_mat q = unvectorize(q_vec, k.mt, k.mt);
    return 0.5 * (q + q.t());
}

arma::cx_mat relay_q_picard(const arma::cx_mat &w, const SystemParams &params, const ChannelSet &ch, double ps,
                            double rel_tol, arma::uword max_iters)
{
    arma::cx_mat q(params.mt, params.mt, arma::fill::zeros);
    for (arma::uword it = 0; it < max_iters; ++it)
    {
        arma::cx_mat next = w * r_op(q, params, ch, ps) * w.t();
        next = 0.5 * (next + next.t());
        const double diff = arma::norm(next - q, "fro");
        const double scale = std::max(arma::norm(next, "fro"), 1e-300);
        q = next;
        if (diff <= rel_tol * scale)
            return q;
        if (!q.is_finite() || arma::abs(q).max() > 1e12 * params.pr_max)
            throw instability_error("relay_q_picard: iteration diverged");
    }
    throw instability_error("relay_q_picard: no convergence within the iteration budget");
}

arma::cx_mat r_op(const arma::cx_mat &q, const SystemParams &params, const ChannelSet &ch, double ps)
{
    const arma::cx_mat base =
        ps * ch.h_sr * ch.h_sr.t() + params.sigma2_nr * arma::eye<arma::cx_mat>(params.mr, params.mr);
    const arma::cx_mat loopback = ch.h_rr * tx_covariance(q, params.kappa) * ch.h_rr.t();
    return base + params.beta * arma::diagmat(base.diag()) + params.beta * arma::diagmat(loopback.diag()) +
           params.kappa * ch.h_rr * arma::diagmat(q.diag()) * ch.h_rr.t();
}

arma::cx_mat tx_covariance(const arma::cx_mat &q, double kappa)
{
    return q + kappa * arma::diagmat(q.diag());
}

PerformanceReport performance(const RelayDesign &d, const SystemParams &params, const ChannelSet &ch)
{
    const LoopKernels k = build_kernels(params, ch, d.ps);
    return performance_with_q(d, relay_q(d.w, k), params, ch);
}

PerformanceReport performance_with_q(const RelayDesign &d, const arma::cx_mat &q, const SystemParams &params,
                                     const ChannelSet &ch)
{
    PerformanceReport rep;
    rep.q = q;
    rep.tx_cov = tx_covariance(q, params.kappa);
    rep.relay_power = std::real(arma::trace(rep.tx_cov));
    rep.loop_spectral_radius = loop_spectral_radius(d.w, build_kernels(params, ch, d.ps));

    const cxd gain = arma::cdot(d.z, ch.h_rd * d.w * ch.h_sr); // z^H H_rd W h_sr
    rep.p_des = d.ps * std::norm(gain);

    const arma::cx_mat denom = ch.h_rd * rep.tx_cov * ch.h_rd.t() +
                               params.sigma2_nd * arma::eye<arma::cx_mat>(params.md, params.md) +
                               d.ps * ch.h_sd * ch.h_sd.t();
    rep.p_tot = std::real(arma::cdot(d.z, denom * d.z));

    if (rep.p_tot <= 0.0)
    {
        // Degenerate filter (z = 0): no received power, SDNR defined as 0.
        rep.p_des = 0.0;
        rep.p_tot = 0.0;
        rep.p_err = 0.0;
        rep.sdnr = 0.0;
        rep.rate = 0.0;
        return rep;
    }

    // P_err >= 0 analytically; the clamp only guards rounding at very high SDNR.
    rep.p_err = std::max(rep.p_tot - rep.p_des, 1e-18 * rep.p_tot);
    rep.sdnr = rep.p_des / rep.p_err;
    rep.rate = std::log2(1.0 + rep.sdnr);
    return rep;
}

arma::cx_vec mmse_z(const arma::cx_mat &w, double ps, const arma::cx_mat &q, const SystemParams &params,
                    const ChannelSet &ch)
{
    const arma::cx_mat denom = ch.h_rd * tx_covariance(q, params.kappa) * ch.h_rd.t() +
                               params.sigma2_nd * arma::eye<arma::cx_mat>(params.md, params.md) +
                               ps * ch.h_sd * ch.h_sd.t();
    return arma::solve(denom, std::sqrt(ps) * ch.h_rd * w * ch.h_sr);
}

double optimal_ps(const arma::cx_mat &w, const SystemParams &params, const ChannelSet &ch)
{
    // C does not depend on P_s, so stability can be checked once.
    const LoopKernels k0 = build_kernels(params, ch, 0.0);
    const double radius = loop_spectral_radius(w, k0);
    if (radius >= 1.0 - stability_margin)
        throw instability_error("optimal_ps: W is unstable independently of the source power");

    const auto relay_power_at = [&](double ps) {
        const LoopKernels k = build_kernels(params, ch, ps);
        return std::real(arma::trace(tx_covariance(relay_q(w, k), params.kappa)));
    };
    const double trace_at = relay_power_at(0.0);
    const double trace_at_max = relay_power_at(params.ps_max);

    if (trace_at_max <= params.pr_max)
        return params.ps_max;

    const double slope = (trace_at_max - trace_at) / params.ps_max;
    if (slope <= 0.0)
        return params.ps_max;
    const double ps_tilde = (params.pr_max - trace_at) / slope;
    return std::clamp(ps_tilde, 0.0, params.ps_max);
}

SimulationReport simulate_time_domain(const RelayDesign &d, const SystemParams &params, const ChannelSet &ch,
                                      arma::uword n_symbols, RngStream &rng, arma::uword warmup,
                                      double ema_decay)
{
    if (n_symbols < 10000)
        throw std::invalid_argument("simulate_time_domain: need at least 1e4 symbols");
    if (warmup >= n_symbols)
        throw std::invalid_argument("simulate_time_domain: warm-up exceeds the symbol budget");

    const double sqrt_ps = std::sqrt(d.ps);
    const double lam = ema_decay;
    const double power_limit = 1e6 * params.pr_max;

    arma::vec ema_in(params.mr, arma::fill::zeros);   // tracks E|u_in,i|^2
    arma::vec ema_out(params.mt, arma::fill::zeros);  // tracks E|u_out,i|^2
    arma::cx_vec r_supp_prev(params.mr, arma::fill::zeros);
    cxd s_prev(0.0, 0.0);

    arma::cx_mat q_acc(params.mt, params.mt, arma::fill::zeros);
    cxd cross_acc(0.0, 0.0);
    double ptot_acc = 0.0;
    double s2_acc = 0.0;
    arma::uword n_used = 0;

    for (arma::uword t = 0; t < n_symbols; ++t)
    {
        const cxd s = rng.cgaussian();

        // Relay output from the previous symbol's suppressed input (tau = 1).
        const arma::cx_vec u_out = d.w * r_supp_prev;
        arma::cx_vec e_out(params.mt);
        for (arma::uword i = 0; i < params.mt; ++i)
        {
            ema_out(i) = lam * ema_out(i) + (1.0 - lam) * std::norm(u_out(i));
            e_out(i) = std::sqrt(params.kappa * ema_out(i)) * rng.cgaussian();
        }
        const arma::cx_vec r_out = u_out + e_out;

        if (ema_out.max() > power_limit)
            throw instability_error("simulate_time_domain: per-antenna power diverged");

        // Relay input and residual after subtracting the known loopback part.
        arma::cx_vec n_r(params.mr);
        for (auto &v : n_r)
            v = std::sqrt(params.sigma2_nr) * rng.cgaussian();
        const arma::cx_vec u_in = ch.h_sr * (sqrt_ps * s) + ch.h_rr * r_out + n_r;
        arma::cx_vec e_in(params.mr);
        for (arma::uword i = 0; i < params.mr; ++i)
        {
            ema_in(i) = lam * ema_in(i) + (1.0 - lam) * std::norm(u_in(i));
            e_in(i) = std::sqrt(params.beta * ema_in(i)) * rng.cgaussian();
        }
        const arma::cx_vec r_in = u_in + e_in;
        const arma::cx_vec r_supp = r_in - ch.h_rr * u_out;

        // Destination observation.
        arma::cx_vec n_d(params.md);
        for (auto &v : n_d)
            v = std::sqrt(params.sigma2_nd) * rng.cgaussian();
        const arma::cx_vec y = ch.h_rd * r_out + ch.h_sd * (sqrt_ps * s) + n_d;
        const cxd s_hat = arma::cdot(d.z, y);

        if (t >= warmup)
        {
            q_acc += u_out * u_out.t();
            ptot_acc += std::norm(s_hat);
            cross_acc += s_hat * std::conj(s_prev);
            s2_acc += std::norm(s_prev);
            ++n_used;
        }

        r_supp_prev = r_supp;
        s_prev = s;
    }

    SimulationReport rep;
    rep.symbols_used = n_used;
    const double n = static_cast<double>(n_used);
    rep.q_hat = q_acc / n;
    rep.p_tot_hat = ptot_acc / n;
    // Least-squares split of s_hat into the component explained by the
    // delayed source symbol and the orthogonal residual; this keeps the
    // desired-power fluctuation out of the error estimate.
    const double explained = (s2_acc > 0.0) ? std::norm(cross_acc) / (s2_acc * n) : 0.0;
    rep.p_des_hat = explained;
    rep.p_err_hat = std::max(rep.p_tot_hat - explained, 0.0);
    rep.sdnr_hat = (rep.p_err_hat > 0.0) ? rep.p_des_hat / rep.p_err_hat : 0.0;
    return rep;
}

} // namespace fdr
