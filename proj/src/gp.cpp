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

#include "gp.hpp"

#include "mustr1.hpp"

namespace fdr
{

arma::cx_mat grad_pdes(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch)
{
    const arma::cx_vec hz = ch.h_rd.t() * z; // H_rd^H z
    return ps * hz * hz.t() * w * ch.h_sr * ch.h_sr.t();
}

arma::cx_mat grad_perr(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch,
                       const LoopKernels &k)
{
    const arma::cx_mat q = relay_q(w, k);
    // vec(R(Q)) = c + C vec(Q); the loop differential flows through W R(Q).
    const arma::cx_mat r = unvectorize(k.drive + k.loop * vectorize(q), k.mr, k.mr);

    const arma::cx_vec hz = ch.h_rd.t() * z;
    const arma::cx_mat d_mat = hz * hz.t();

    const arma::uword n = k.mt * k.mt;
    const arma::cx_mat eye_n = arma::eye<arma::cx_mat>(n, n);
    const arma::cx_mat lhs = eye_n - arma::kron(arma::conj(w), w) * k.loop;
    const arma::cx_mat sd_mt = arma::conv_to<arma::cx_mat>::from(k.sel_diag_mt);
    const arma::cx_vec rhs = (eye_n + k.kappa * sd_mt) * vectorize(arma::cx_mat(d_mat.st()));

    // v = (I - (W* kron W) C)^{-T} (I + kappa S_D) vec(D^T); the gradient of
    // the relay-path part of P_tot is then V^T W R(Q).
    arma::cx_vec v;
    if (!arma::solve(v, lhs.st(), rhs))
        throw instability_error("grad_perr: loop system is numerically singular");
    const arma::cx_mat v_mat = unvectorize(v, k.mt, k.mt);

    return v_mat.st() * w * r - grad_pdes(w, z, ps, ch);
}

arma::cx_mat grad_sdnr(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const SystemParams &params,
                       const ChannelSet &ch, const LoopKernels &k)
{
    const arma::cx_mat q = relay_q(w, k);
    const RelayDesign d{w, z, ps};
    const PerformanceReport rep = performance_with_q(d, q, params, ch);
    if (rep.p_err <= 0.0)
        throw std::invalid_argument("grad_sdnr: P_err must be positive");

    const arma::cx_mat gd = grad_pdes(w, z, ps, ch);
    const arma::cx_mat ge = grad_perr(w, z, ps, ch, k);
    return (gd * rep.p_err - ge * rep.p_des) / (rep.p_err * rep.p_err);
}

arma::cx_mat grad_pdes_selection(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch)
{
    const arma::cx_mat st = selection_T(w.n_rows, w.n_cols).cx();
    const arma::cx_rowvec left = z.st() * arma::conj(ch.h_rd);                    // z^T H_rd*
    const arma::cx_rowvec right = ps * z.t() * ch.h_rd * w * ch.h_sr * ch.h_sr.t(); // P_s z^H H_rd W h h^H
    const arma::cx_rowvec row = arma::kron(left, right) * st;
    return unvectorize(row.st(), w.n_rows, w.n_cols);
}

arma::cx_mat grad_perr_selection(const arma::cx_mat &w, const arma::cx_vec &z, double ps, const ChannelSet &ch,
                                 const LoopKernels &k)
{
    const arma::cx_mat q = relay_q(w, k);
    const arma::cx_vec r_vec = k.drive + k.loop * vectorize(q);

    const arma::cx_vec hz = ch.h_rd.t() * z;
    const arma::cx_mat d_mat = hz * hz.t();

    const arma::uword n = k.mt * k.mt;
    const arma::cx_mat eye_n = arma::eye<arma::cx_mat>(n, n);
    const arma::cx_mat t_inv = arma::inv(eye_n - arma::kron(arma::conj(w), w) * k.loop);
    const arma::cx_mat sd_mt = arma::conv_to<arma::cx_mat>::from(k.sel_diag_mt);

    const arma::cx_rowvec row_d =
        arma::cx_rowvec(vectorize(arma::cx_mat(d_mat.st())).st()) * (eye_n + k.kappa * sd_mt);
    const arma::cx_mat sk = selection_K(w.n_rows, w.n_cols).cx();
    const arma::uword mn = w.n_rows * w.n_cols;
    const arma::cx_mat w_kron_eye = arma::kron(vectorize(w), arma::eye<arma::cx_mat>(mn, mn));

    const arma::cx_rowvec row = row_d * arma::kron(r_vec.st(), t_inv) * sk * w_kron_eye;
    return unvectorize(row.st(), w.n_rows, w.n_cols) - grad_pdes_selection(w, z, ps, ch);
}

arma::cx_mat project_design(const arma::cx_mat &w_old, const SystemParams &params, const ChannelSet &ch,
                            double ps)
{
    const LoopKernels k = build_kernels(params, ch, ps);
    const arma::cx_mat q_old = relay_q(w_old, k);
    const PsdProjection proj = psd_project_power(q_old, params.pr_cap_undistorted());
    const arma::cx_mat &q_new = proj.matrix;

    const arma::cx_mat r_old = r_op(q_old, params, ch, ps);
    const arma::cx_mat r_new = r_op(q_new, params, ch, ps);

    arma::cx_mat v = herm_inv_sqrt(q_old) * w_old * herm_sqrt(r_old);
    const arma::uword mt = params.mt;
    const double unitary_residual = arma::norm(v * v.t() - arma::eye<arma::cx_mat>(mt, mt), "fro");
    if (!v.is_finite())
    {
        v = arma::eye<arma::cx_mat>(mt, params.mr);
    }
    else if (unitary_residual > 1e-8)
    {
        // Rank-deficient Q_old: replace V by its polar factor, the nearest
        // co-isometry.
        arma::cx_mat u_svd, v_svd;
        arma::vec s_svd;
        if (arma::svd_econ(u_svd, s_svd, v_svd, v))
            v = u_svd * v_svd.t();
        else
            v = arma::eye<arma::cx_mat>(mt, params.mr);
    }

    return herm_sqrt(q_new) * v * herm_inv_sqrt(r_new);
}

namespace
{

struct InitPoint
{
    arma::cx_mat w;
    arma::cx_vec z;
    double ps = 0.0;
};

// W = Q^{1/2} R^{-1/2}(Q) realizes a random PSD covariance as the loop fixed
// point; the draw is shrunk until the loop is stable.
InitPoint random_init(const SystemParams &params, const ChannelSet &ch, RngStream &rng)
{
    InitPoint p;
    p.ps = params.ps_max * 1e-4;
    const double cap = params.pr_cap_undistorted();
    const LoopKernels k = build_kernels(params, ch, p.ps);

    arma::cx_mat g = rng.cgaussian_matrix(params.mt, params.mt);
    arma::cx_mat q0 = g * g.t();
    q0 *= (0.1 + 0.9 * rng.uniform()) * cap / std::real(arma::trace(q0));

    // Rectangular identity bridges the Mt- and Mr-sided square roots.
    const arma::cx_mat bridge = arma::eye<arma::cx_mat>(params.mt, params.mr);
    for (int attempt = 0; attempt < 80; ++attempt)
    {
        arma::cx_mat w = herm_sqrt(q0) * bridge * herm_inv_sqrt(r_op(q0, params, ch, p.ps));
        if (loop_spectral_radius(w, k) < 1.0 - 1e-6)
        {
            // With mt > mr the realized fixed point is not q0 itself; project
            // once so the starting point is always feasible.
            if ((1.0 + params.kappa) * std::real(arma::trace(relay_q(w, k))) > params.pr_max)
                w = project_design(w, params, ch, p.ps);
            p.w = w;
            p.z = mmse_z(w, p.ps, relay_q(w, k), params, ch);
            return p;
        }
        q0 *= 0.25;
    }
    throw instability_error("gp_optimize: could not find a stable random initialization");
}

} // namespace

GpResult gp_optimize(const SystemParams &params, const ChannelSet &ch, const GpConfig &cfg, RngStream &rng)
{
    if (cfg.inits < 1)
        throw std::invalid_argument("gp_optimize: need at least one initialization");
    if (cfg.sigma_armijo <= 0.0 || cfg.sigma_armijo >= 1.0 || cfg.nu <= 0.0 || cfg.nu >= 1.0 ||
        cfg.delta <= 0.0)
        throw std::invalid_argument("gp_optimize: line-search parameters out of range");
    params.validate();
    ch.validate(params);

    GpResult result;
    result.sdnr_traces.resize(cfg.inits);
    double best_sdnr = -1.0;
    arma::uword sample_counter = 0;

    for (arma::uword init = 0; init < cfg.inits; ++init)
    {
        InitPoint point;
        if (init == 0)
        {
            // Deterministic strong start from the power-adjusted MRC/MRT
            // design; ascent from here makes the baseline dominance exact.
            const Rank1Result seed = mrc_mrt_design(params, ch);
            point.w = seed.design.w();
            point.z = seed.design.z;
            point.ps = params.ps_max;
        }
        else
        {
            point = random_init(params, ch, rng);
        }

        arma::cx_mat w = point.w;
        arma::cx_vec z = point.z;
        double ps = point.ps;
        LoopKernels k = build_kernels(params, ch, ps);
        double sdnr = performance_with_q({w, z, ps}, relay_q(w, k), params, ch).sdnr;

        auto &trace = result.sdnr_traces[init];
        trace.push_back(sdnr);

        for (arma::uword iter = 0; iter < cfg.max_iters; ++iter)
        {
            arma::cx_mat grad;
            try
            {
                grad = grad_sdnr(w, z, ps, params, ch, k);
            }
            catch (const std::exception &)
            {
                break;
            }

            // Projected full step; shrink delta while the stepped point has a
            // divergent loop and no covariance to project.
            arma::cx_mat w_bar;
            bool have_bar = false;
            double delta = cfg.delta;
            for (int shrink = 0; shrink < 60 && !have_bar; ++shrink)
            {
                try
                {
                    w_bar = project_design(w + delta * grad, params, ch, ps);
                    have_bar = true;
                }
                catch (const instability_error &)
                {
                    delta *= 0.5;
                }
            }
            if (!have_bar)
                break;

            const arma::cx_mat dirn = w_bar - w;
            const double slope = std::real(arma::accu(arma::conj(grad) % dirn));

            bool accepted = false;
            double gamma = 1.0;
            arma::cx_mat w_acc;
            for (arma::uword m = 0; m < cfg.armijo_max_backtracks && !accepted; ++m)
            {
                arma::cx_mat w_cand = w + gamma * dirn;
                try
                {
                    arma::cx_mat q_cand = relay_q(w_cand, k);
                    if ((1.0 + params.kappa) * std::real(arma::trace(q_cand)) > params.pr_max + 1e-9)
                    {
                        // The interpolated point left the feasible set; pull
                        // it back before judging the step.
                        w_cand = project_design(w_cand, params, ch, ps);
                        q_cand = relay_q(w_cand, k);
                    }
                    const double cand =
                        performance_with_q({w_cand, z, ps}, q_cand, params, ch).sdnr;
                    const double required = cfg.sigma_armijo * gamma * std::max(slope, 0.0);
                    if (cand - sdnr >= required && cand > sdnr)
                    {
                        accepted = true;
                        w_acc = w_cand;
                    }
                }
                catch (const instability_error &)
                {
                    // unstable candidate: keep backtracking
                }
                gamma *= cfg.nu;
            }
            if (!accepted)
                break;

            w = w_acc;
            ps = optimal_ps(w, params, ch);
            k = build_kernels(params, ch, ps);
            const arma::cx_mat q = relay_q(w, k);
            z = mmse_z(w, ps, q, params, ch);
            const double sdnr_new = performance_with_q({w, z, ps}, q, params, ch).sdnr;

            trace.push_back(sdnr_new);
            ++result.total_iterations;
            ++sample_counter;
            if (cfg.sample_every > 0 && sample_counter % cfg.sample_every == 0)
            {
                result.sampled_iterates.push_back(w);
                result.sampled_ps.push_back(ps);
            }

            const double improvement = sdnr_new - sdnr;
            sdnr = sdnr_new;
            if (improvement < cfg.c1 * std::max(1.0, sdnr))
                break;
        }

        if (sdnr > best_sdnr)
        {
            best_sdnr = sdnr;
            result.best_init = init;
            result.design = {w, z, ps};
        }
    }

    result.report = performance(result.design, params, ch);
    return result;
}

} // namespace fdr
