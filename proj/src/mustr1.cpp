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

#include "mustr1.hpp"

#include <functional>
#include <limits>

namespace fdr
{

namespace
{

// H_X Gamma_i keeps only column i of H_X.
arma::cx_mat column_only(const arma::cx_mat &h, arma::uword i)
{
    arma::cx_mat out(h.n_rows, h.n_cols, arma::fill::zeros);
    out.col(i) = h.col(i);
    return out;
}

arma::cx_mat stack_distortion(const SystemParams &params, const arma::cx_mat &h_rr, const arma::cx_mat &h_rd_eff)
{
    const double sk = std::sqrt(params.kappa);
    const double sb = std::sqrt(params.beta);
    const arma::uword mt = params.mt;
    const arma::uword mr = params.mr;

    arma::cx_mat out(mt * (h_rr.n_rows + h_rd_eff.n_rows) + mr * mr, mt, arma::fill::zeros);
    arma::uword row = 0;
    for (arma::uword i = 0; i < mt; ++i)
    {
        out.rows(row, row + h_rr.n_rows - 1) = sk * column_only(h_rr, i);
        row += h_rr.n_rows;
    }
    for (arma::uword i = 0; i < mt; ++i)
    {
        out.rows(row, row + h_rd_eff.n_rows - 1) = sk * column_only(h_rd_eff, i);
        row += h_rd_eff.n_rows;
    }
    for (arma::uword i = 0; i < mr; ++i)
    {
        // Gamma_i H_rr keeps only row i.
        out.row(row + i) = sb * h_rr.row(i);
    }
    return out;
}

// Rotates the largest entry onto the positive real axis; filters are only
// defined up to a common phase and a fixed convention keeps outputs
// deterministic.
arma::cx_vec canonical_phase(arma::cx_vec v)
{
    const arma::uword idx = arma::abs(v).index_max();
    const double mag = std::abs(v(idx));
    if (mag > 0.0)
        v *= std::conj(v(idx)) / mag;
    return v;
}

// Dominant eigenvector of B^{-1} A for Hermitian A >= 0, B > 0.
arma::cx_vec dominant_generalized_eigvec(const arma::cx_mat &a, const arma::cx_mat &b)
{
    const arma::cx_mat b_isqrt = herm_inv_sqrt(b);
    const HermEig eig = herm_eig(b_isqrt * a * b_isqrt);
    arma::cx_vec w = b_isqrt * eig.vectors.col(0);
    return canonical_phase(w / arma::norm(w, 2));
}

arma::cx_vec dominant_right_singular(const arma::cx_mat &h)
{
    const HermEig eig = herm_eig(h.t() * h);
    return canonical_phase(eig.vectors.col(0));
}

OmegaPolynomials coeffs_impl(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx,
                             const arma::cx_vec &w_rx, const arma::cx_vec *z, arma::uword order)
{
    if (order < 2)
        throw std::invalid_argument("omega_coeffs: approximation order must be >= 2");

    const double ps = params.ps_max;
    const LoopKernels k = build_kernels(params, ch, ps);
    const arma::cx_mat w0 = w_tx * w_rx.t();
    const arma::cx_mat w_kron = arma::kron(arma::conj(w0), w0);
    const arma::cx_mat sd_mt = arma::conv_to<arma::cx_mat>::from(k.sel_diag_mt);
    const arma::cx_mat eye_kappa =
        arma::eye<arma::cx_mat>(params.mt * params.mt, params.mt * params.mt) + params.kappa * sd_mt;

    // Row functional for the destination-side power: the plain trace in
    // MuStR1 mode, z^H (.) z when the destination filter is folded in.
    arma::cx_rowvec row_d(params.md * params.md);
    if (z == nullptr)
        row_d = vectorize(arma::eye<arma::cx_mat>(params.md, params.md)).st();
    else
        row_d = arma::kron(z->st(), z->t());

    const arma::cx_rowvec row_h = row_d * arma::kron(arma::conj(ch.h_rd), ch.h_rd);
    const arma::cx_rowvec row_a = row_h * eye_kappa;
    const arma::cx_rowvec row_b = vectorize(arma::eye<arma::cx_mat>(params.mt, params.mt)).st() * eye_kappa;

    OmegaPolynomials p;
    p.a_d = ps * std::real(arma::as_scalar(row_h * (w_kron * vectorize(ch.h_sr * ch.h_sr.t()))));
    const arma::cx_mat noise_term = params.sigma2_nd * arma::eye<arma::cx_mat>(params.md, params.md) +
                                    ps * ch.h_sd * ch.h_sd.t();
    p.a0 = std::real(arma::as_scalar(row_d * vectorize(noise_term)));

    p.a_raw.set_size(order);
    p.b.set_size(order);
    arma::cx_vec u = w_kron * k.drive; // (W~ C)^{k-1} W~ c, starting at k = 1
    for (arma::uword kk = 0; kk < order; ++kk)
    {
        p.a_raw(kk) = std::real(arma::as_scalar(row_a * u));
        p.b(kk) = std::real(arma::as_scalar(row_b * u));
        if (kk + 1 < order)
            u = w_kron * (k.loop * u);
    }
    return p;
}

double bisect_increasing(const std::function<double(double)> &f, double target, double lo, double hi)
{
    for (int it = 0; it < 400 && (hi - lo) > 1e-12 * std::max(hi, 1e-300); ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Exact relay transmit power of sqrt(omega) w0; +inf past the loop pole.
double exact_relay_power(double omega, const arma::cx_mat &w0, const LoopKernels &k, double kappa)
{
    try
    {
        const arma::cx_mat q = relay_q(std::sqrt(omega) * w0, k);
        return std::real(arma::trace(tx_covariance(q, kappa)));
    }
    catch (const instability_error &)
    {
        return std::numeric_limits<double>::infinity();
    }
}

// The polynomial power model underestimates the true power (truncated series
// with non-negative terms), so the cap can be overshot slightly; pull omega
// back onto the exact power curve when that happens.
double polish_omega_power(double omega, const arma::cx_mat &w0, const LoopKernels &k,
                          const SystemParams &params)
{
    if (omega <= 0.0)
        return 0.0;
    if (exact_relay_power(omega, w0, k, params.kappa) <= params.pr_max * (1.0 + 1e-12))
        return omega;
    const auto f = [&](double w) { return exact_relay_power(w, w0, k, params.kappa); };
    return bisect_increasing(f, params.pr_max, 0.0, omega);
}

Rank1Result finish_rank1(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx,
                         const arma::cx_vec &w_rx, const OmegaPolynomials &p)
{
    const OmegaSolution sol = solve_omega(p, params.pr_max);
    const LoopKernels k = build_kernels(params, ch, params.ps_max);
    const arma::cx_mat w0 = w_tx * w_rx.t();
    const double omega = polish_omega_power(sol.omega_star, w0, k, params);

    Rank1Result res;
    res.design.w_tx = w_tx;
    res.design.w_rx = w_rx;
    res.design.omega = omega;

    RelayDesign d;
    d.w = res.design.w();
    d.ps = params.ps_max;
    const arma::cx_mat q = relay_q(d.w, k);
    d.z = mmse_z(d.w, d.ps, q, params, ch);
    res.design.z = d.z;
    res.report = performance_with_q(d, q, params, ch);
    return res;
}

} // namespace

arma::cx_mat distortion_channel_tx(const SystemParams &params, const ChannelSet &ch)
{
    return stack_distortion(params, ch.h_rr, ch.h_rd);
}

arma::cx_mat distortion_channel_tx_projected(const SystemParams &params, const ChannelSet &ch,
                                             const arma::cx_vec &z)
{
    return stack_distortion(params, ch.h_rr, z.t() * ch.h_rd);
}

arma::cx_vec design_wtx(const SystemParams &params, const ChannelSet &ch)
{
    const arma::cx_mat h_d = distortion_channel_tx(params, ch);
    const double n_tx = (static_cast<double>(params.md) * params.sigma2_nd +
                         params.ps_max * std::pow(arma::norm(ch.h_sd, 2), 2)) /
                        params.pr_max;
    const arma::cx_mat b = h_d.t() * h_d + n_tx * arma::eye<arma::cx_mat>(params.mt, params.mt);
    return dominant_generalized_eigvec(ch.h_rd.t() * ch.h_rd, b);
}

arma::cx_vec design_wtx_projected(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &z)
{
    const arma::cx_mat h_d = distortion_channel_tx_projected(params, ch, z);
    const double n_tx = (params.sigma2_nd * std::pow(arma::norm(z, 2), 2) +
                         params.ps_max * std::norm(arma::cdot(z, ch.h_sd))) /
                        params.pr_max;
    const arma::cx_mat b = h_d.t() * h_d + n_tx * arma::eye<arma::cx_mat>(params.mt, params.mt);
    const arma::cx_rowvec h_eff = z.t() * ch.h_rd;
    return dominant_generalized_eigvec(h_eff.t() * h_eff, b);
}

arma::cx_vec design_wrx(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx)
{
    if (std::abs(arma::norm(w_tx, 2) - 1.0) > 1e-9)
        throw std::invalid_argument("design_wrx: w_tx must be unit norm");
    const arma::cx_mat outer = w_tx * w_tx.t();
    const arma::cx_mat phi = params.kappa * params.pr_max * ch.h_rr * arma::diagmat(outer.diag()) * ch.h_rr.t() +
                             params.beta * params.pr_max *
                                 arma::diagmat(arma::cx_mat(ch.h_rr * outer * ch.h_rr.t()).diag());
    // Rank-1 numerator: the dominant generalized eigenvector is the solved
    // matched filter, no eigensolve needed.
    arma::cx_vec w = arma::solve(phi + params.sigma2_nr * arma::eye<arma::cx_mat>(params.mr, params.mr), ch.h_sr);
    return canonical_phase(w / arma::norm(w, 2));
}

OmegaPolynomials omega_coeffs(const SystemParams &params, const ChannelSet &ch, const arma::cx_vec &w_tx,
                              const arma::cx_vec &w_rx, arma::uword order)
{
    return coeffs_impl(params, ch, w_tx, w_rx, nullptr, order);
}

OmegaPolynomials omega_coeffs_projected(const SystemParams &params, const ChannelSet &ch,
                                        const arma::cx_vec &w_tx, const arma::cx_vec &w_rx,
                                        const arma::cx_vec &z, arma::uword order)
{
    return coeffs_impl(params, ch, w_tx, w_rx, &z, order);
}

OmegaSolution solve_omega(const OmegaPolynomials &p, double pr_max)
{
    if (p.a_d <= 0.0)
        throw std::invalid_argument("solve_omega: desired-power coefficient must be positive");
    if (arma::all(p.b <= 0.0))
        throw std::invalid_argument("solve_omega: relay power model is identically zero");

    OmegaSolution sol;

    bool higher_b = false;
    for (arma::uword k = 1; k < p.b.n_elem; ++k)
        higher_b = higher_b || (p.b(k) > 0.0);
    if (!higher_b)
    {
        sol.omega_max = pr_max / p.b(0); // linear power model, exact root
    }
    else
    {
        double hi = 1.0;
        while (p.f2(hi) < pr_max && hi < 1e300)
            hi *= 2.0;
        sol.omega_max = bisect_increasing([&](double w) { return p.f2(w); }, pr_max, 0.0, hi);
    }

    bool higher_a = false;
    for (arma::uword k = 1; k < p.a_raw.n_elem; ++k)
        higher_a = higher_a || (p.a_raw(k) > 0.0);
    if (!higher_a || p.a0 <= 0.0)
    {
        // Stationarity RHS never reaches a0: SDNR keeps growing, amplify to
        // the power cap.
        sol.omega_0 = std::numeric_limits<double>::infinity();
    }
    else
    {
        double hi = sol.omega_max;
        while (p.stationarity_rhs(hi) < p.a0 && hi <= sol.omega_max * 1e3)
            hi *= 2.0;
        if (p.stationarity_rhs(hi) < p.a0)
            sol.omega_0 = std::numeric_limits<double>::infinity();
        else
            sol.omega_0 = bisect_increasing([&](double w) { return p.stationarity_rhs(w); }, p.a0, 0.0, hi);
    }

    sol.omega_star = std::min(sol.omega_0, sol.omega_max);
    return sol;
}

Rank1Result mustr1(const SystemParams &params, const ChannelSet &ch, arma::uword order)
{
    const arma::cx_vec w_tx = design_wtx(params, ch);
    const arma::cx_vec w_rx = design_wrx(params, ch, w_tx);
    return finish_rank1(params, ch, w_tx, w_rx, omega_coeffs(params, ch, w_tx, w_rx, order));
}

Rank1Result alt_mustr1(const SystemParams &params, const ChannelSet &ch, arma::uword order,
                       arma::uword max_iters, double tol)
{
    if (max_iters < 1)
        throw std::invalid_argument("alt_mustr1: need at least one iteration");

    Rank1Result best = mustr1(params, ch, order);
    arma::cx_mat w_prev = best.design.w();
    arma::cx_vec z = best.design.z;
    arma::uword iterations = 1;

    for (arma::uword it = 1; it < max_iters; ++it)
    {
        const arma::cx_vec w_tx = design_wtx_projected(params, ch, z);
        const arma::cx_vec w_rx = design_wrx(params, ch, w_tx);
        Rank1Result step =
            finish_rank1(params, ch, w_tx, w_rx, omega_coeffs_projected(params, ch, w_tx, w_rx, z, order));
        ++iterations;

        if (step.report.sdnr > best.report.sdnr)
            best = step;

        const arma::cx_mat w_new = step.design.w();
        const double delta = arma::norm(w_new - w_prev, "fro");
        w_prev = w_new;
        z = step.design.z;
        if (delta < tol)
            break;
    }
    best.iterations = iterations;
    return best;
}

Rank1Result mrc_mrt_design(const SystemParams &params, const ChannelSet &ch, arma::uword order)
{
    const arma::cx_vec w_rx = ch.h_sr / arma::norm(ch.h_sr, 2);
    const arma::cx_vec w_tx = dominant_right_singular(ch.h_rd);
    return finish_rank1(params, ch, w_tx, w_rx, omega_coeffs(params, ch, w_tx, w_rx, order));
}

} // namespace fdr
