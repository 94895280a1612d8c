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

#include "df.hpp"

#include <limits>

namespace fdr
{

namespace
{

constexpr double feasibility_slack = -1e-8;

struct SlackModel
{
    // slack_sr = sr_const + sr_ps * P_s + <phi_sr, Q>
    // slack_rd = rd_const + rd_ps * P_s + <phi_rd, Q>
    double sr_const = 0.0;
    double sr_ps = 0.0;
    double rd_const = 0.0;
    double rd_ps = 0.0;
    arma::cx_mat phi_sr;
    arma::cx_mat phi_rd;

    double slack_sr(const arma::cx_mat &q, double ps) const
    {
        return sr_const + sr_ps * ps + std::real(arma::trace(phi_sr * q));
    }
    double slack_rd(const arma::cx_mat &q, double ps) const
    {
        return rd_const + rd_ps * ps + std::real(arma::trace(phi_rd * q));
    }
    double min_slack(const arma::cx_mat &q, double ps) const
    {
        return std::min(slack_sr(q, ps), slack_rd(q, ps));
    }
};

SlackModel build_slacks(double zeta, const arma::cx_vec &v_in, const arma::cx_vec &z,
                        const SystemParams &params, const ChannelSet &ch)
{
    SlackModel m;
    m.sr_ps = std::norm(arma::cdot(v_in, ch.h_sr));
    m.sr_const = -zeta * params.sigma2_nr * std::pow(arma::norm(v_in, 2), 2);
    m.rd_const = -zeta * params.sigma2_nd * std::pow(arma::norm(z, 2), 2);
    m.rd_ps = -zeta * std::norm(arma::cdot(z, ch.h_sd));

    const arma::cx_vec hv = ch.h_rr.t() * v_in; // H_rr^H v_in
    const arma::cx_mat diag_v = arma::diagmat(arma::cx_vec(arma::square(arma::abs(v_in)),
                                                           arma::vec(v_in.n_elem, arma::fill::zeros)));
    m.phi_sr = -zeta * (params.kappa * arma::diagmat(arma::cx_mat(hv * hv.t()).diag()) +
                        params.beta * ch.h_rr.t() * diag_v * ch.h_rr);

    const arma::cx_vec hz = ch.h_rd.t() * z;
    const arma::cx_mat outer = hz * hz.t();
    m.phi_rd = outer - zeta * params.kappa * arma::diagmat(outer.diag());

    m.phi_sr = 0.5 * (m.phi_sr + m.phi_sr.t());
    m.phi_rd = 0.5 * (m.phi_rd + m.phi_rd.t());
    return m;
}

arma::cx_mat top_eig_rank1(const arma::cx_mat &a, double scale)
{
    const HermEig eig = herm_eig(a);
    if (eig.values(0) <= 0.0)
        return arma::cx_mat(a.n_rows, a.n_cols, arma::fill::zeros);
    const arma::cx_vec u = eig.vectors.col(0);
    return scale * u * u.t();
}

// max_Q [t slack_sr + (1-t) slack_rd] over the trace-capped PSD cone; an
// upper bound on the max-min slack for every t in [0, 1] (weak duality).
double combination_bound(const SlackModel &m, double ps, double cap, double t)
{
    const double c = t * (m.sr_const + m.sr_ps * ps) + (1.0 - t) * (m.rd_const + m.rd_ps * ps);
    const arma::cx_mat phi = t * m.phi_sr + (1.0 - t) * m.phi_rd;
    const double lam = herm_eig(phi).values(0);
    return c + cap * std::max(lam, 0.0);
}

// Convex in t; golden-section returns (t*, bound at t*).
std::pair<double, double> min_combination_bound(const SlackModel &m, double ps, double cap)
{
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = combination_bound(m, ps, cap, x1);
    double f2 = combination_bound(m, ps, cap, x2);
    for (int it = 0; it < 40; ++it)
    {
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = combination_bound(m, ps, cap, x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = combination_bound(m, ps, cap, x2);
        }
    }
    const double t_star = 0.5 * (lo + hi);
    return {t_star, combination_bound(m, ps, cap, t_star)};
}

// Exact feasible interval of p for Q = p u u^H at fixed P_s (both slacks are
// affine in p); returns the chosen p or -1 when the interval is empty.
double rank1_interval(const SlackModel &m, const arma::cx_vec &u, double ps, double cap)
{
    const double g_sr = std::real(arma::cdot(u, m.phi_sr * u));
    const double g_rd = std::real(arma::cdot(u, m.phi_rd * u));
    const double c_sr = m.sr_const + m.sr_ps * ps;
    const double c_rd = m.rd_const + m.rd_ps * ps;

    double lo = 0.0;
    double hi = cap;
    // c + p g >= feasibility_slack for each constraint
    for (const auto &[c, g] : {std::pair{c_sr, g_sr}, std::pair{c_rd, g_rd}})
    {
        if (g > 0.0)
            lo = std::max(lo, (feasibility_slack - c) / g);
        else if (g < 0.0)
            hi = std::min(hi, (feasibility_slack - c) / g);
        else if (c < feasibility_slack)
            return -1.0;
    }
    if (lo > hi)
        return -1.0;
    return 0.5 * (lo + hi);
}

} // namespace

std::pair<double, double> df_constraint_slacks(double zeta, const arma::cx_mat &q, double ps,
                                               const arma::cx_vec &v_in, const arma::cx_vec &z,
                                               const SystemParams &params, const ChannelSet &ch)
{
    const SlackModel m = build_slacks(zeta, v_in, z, params, ch);
    return {m.slack_sr(q, ps), m.slack_rd(q, ps)};
}

DfLinkSdnrs df_link_sdnrs(const DfDesign &d, const SystemParams &params, const ChannelSet &ch)
{
    DfLinkSdnrs out;

    const arma::cx_mat denom_sr =
        params.sigma2_nr * arma::eye<arma::cx_mat>(params.mr, params.mr) +
        params.kappa * ch.h_rr * arma::diagmat(d.q.diag()) * ch.h_rr.t() +
        params.beta * arma::diagmat(arma::cx_mat(ch.h_rr * d.q * ch.h_rr.t()).diag());
    const double den_sr = std::real(arma::cdot(d.v_in, denom_sr * d.v_in));
    out.zeta_sr = (den_sr > 0.0) ? d.ps * std::norm(arma::cdot(d.v_in, ch.h_sr)) / den_sr : 0.0;

    const arma::cx_mat denom_rd =
        params.sigma2_nd * arma::eye<arma::cx_mat>(params.md, params.md) +
        params.kappa * ch.h_rd * arma::diagmat(d.q.diag()) * ch.h_rd.t() +
        d.ps * ch.h_sd * ch.h_sd.t();
    const double den_rd = std::real(arma::cdot(d.z, denom_rd * d.z));
    out.zeta_rd = (den_rd > 0.0) ? std::real(arma::cdot(d.z, ch.h_rd * d.q * ch.h_rd.t() * d.z)) / den_rd : 0.0;
    return out;
}

DfFilters df_filters(const arma::cx_mat &q, double ps, const SystemParams &params, const ChannelSet &ch)
{
    DfFilters f;

    arma::cx_vec v_out(params.mt, arma::fill::zeros);
    const HermEig eig = herm_eig(q);
    if (eig.values(0) > 0.0)
        v_out = std::sqrt(eig.values(0)) * eig.vectors.col(0);

    const arma::cx_mat denom_z = params.sigma2_nd * arma::eye<arma::cx_mat>(params.md, params.md) +
                                 params.kappa * ch.h_rd * arma::diagmat(q.diag()) * ch.h_rd.t() +
                                 ps * ch.h_sd * ch.h_sd.t();
    f.z = arma::solve(denom_z, ch.h_rd * v_out);
    if (arma::norm(f.z, 2) == 0.0)
    {
        // Degenerate Q: fall back to the matched filter of the strongest
        // transmit direction so the quotients stay well defined.
        const HermEig hrd = herm_eig(ch.h_rd.t() * ch.h_rd);
        f.z = arma::solve(denom_z, ch.h_rd * hrd.vectors.col(0));
    }

    const arma::cx_mat denom_v =
        params.sigma2_nr * arma::eye<arma::cx_mat>(params.mr, params.mr) +
        params.kappa * ch.h_rr * arma::diagmat(q.diag()) * ch.h_rr.t() +
        params.beta * arma::diagmat(arma::cx_mat(ch.h_rr * q * ch.h_rr.t()).diag());
    f.v_in = arma::solve(denom_v, ch.h_sr * std::sqrt(ps > 0.0 ? ps : params.ps_max));
    return f;
}

DfWitness df_feasible(double zeta, const arma::cx_vec &v_in, const arma::cx_vec &z, const SystemParams &params,
                      const ChannelSet &ch, const arma::cx_mat *q_hint, double ps_hint)
{
    if (zeta < 0.0)
        throw std::invalid_argument("df_feasible: zeta must be >= 0");

    const double cap = params.pr_cap_undistorted();
    const SlackModel m = build_slacks(zeta, v_in, z, params, ch);

    // P_s grid (the slacks are affine in P_s): zero plus log-spaced points up
    // to the cap, scanned from the top; hinted value first.
    std::vector<double> ps_grid;
    if (ps_hint >= 0.0)
        ps_grid.push_back(std::min(ps_hint, params.ps_max));
    for (int i = 31; i >= 0; --i)
        ps_grid.push_back(params.ps_max * std::pow(10.0, -6.0 * (1.0 - i / 31.0)));
    ps_grid.push_back(0.0);

    DfWitness best;
    best.slack = -std::numeric_limits<double>::infinity();

    for (const double ps : ps_grid)
    {
        // Duality prune: if even the best affine combination of the two
        // slacks cannot reach the threshold, no Q works at this P_s.
        const auto [t_star, bound] = min_combination_bound(m, ps, cap);
        if (bound < feasibility_slack)
            continue;

        // Candidate starting points: analytic rank-1 maximizers of slack
        // combinations plus the caller's hint.
        std::vector<arma::cx_mat> starts;
        starts.emplace_back(params.mt, params.mt, arma::fill::zeros);
        starts.push_back(top_eig_rank1(m.phi_rd, cap));
        starts.push_back(top_eig_rank1(t_star * m.phi_sr + (1.0 - t_star) * m.phi_rd, cap));
        starts.push_back(top_eig_rank1(0.5 * (m.phi_rd + m.phi_sr), cap));
        if (q_hint != nullptr)
            starts.push_back(*q_hint);

        arma::cx_mat q = starts.front();
        double q_slack = m.min_slack(q, ps);
        for (const auto &cand : starts)
        {
            const double s = m.min_slack(cand, ps);
            if (s > q_slack)
            {
                q = cand;
                q_slack = s;
            }
        }

        if (q_slack > best.slack)
        {
            best.slack = q_slack;
            best.q = q;
            best.ps = ps;
        }

        // Projected supergradient ascent on the min-slack objective.
        if (q_slack < feasibility_slack)
        {
            for (int it = 0; it < 500; ++it)
            {
                const double s_sr = m.slack_sr(q, ps);
                const double s_rd = m.slack_rd(q, ps);
                arma::cx_mat grad;
                if (std::abs(s_sr - s_rd) < 1e-14)
                    grad = 0.5 * (m.phi_sr + m.phi_rd);
                else
                    grad = (s_sr < s_rd) ? m.phi_sr : m.phi_rd;

                const double gnorm = arma::norm(grad, "fro");
                if (gnorm == 0.0)
                    break;
                const double step = cap / gnorm / std::sqrt(static_cast<double>(it) + 1.0);
                q = psd_project_power(q + step * grad, cap).matrix;

                const double s = m.min_slack(q, ps);
                if (s > best.slack)
                {
                    best.slack = s;
                    best.q = q;
                    best.ps = ps;
                }
                if (best.slack >= 0.0)
                    break;
            }
        }

        if (best.slack >= feasibility_slack)
            break;
    }

    // Witness verification before declaring feasibility.
    if (best.slack >= feasibility_slack)
    {
        const auto [s_sr, s_rd] = df_constraint_slacks(zeta, best.q, best.ps, v_in, z, params, ch);
        best.feasible = std::min(s_sr, s_rd) >= feasibility_slack &&
                        std::real(arma::trace(best.q)) <= cap + 1e-8 && best.ps >= 0.0 &&
                        best.ps <= params.ps_max;
        best.slack = std::min(s_sr, s_rd);
    }
    return best;
}

double df_zeta_upper_bound(const SystemParams &params, const ChannelSet &ch)
{
    const HermEig eig = herm_eig(ch.h_rd * ch.h_rd.t());
    const double sr = params.ps_max * std::pow(arma::norm(ch.h_sr, 2), 2) / params.sigma2_nr;
    const double rd = params.pr_max * eig.values(0) / params.sigma2_nd;
    return std::min(sr, rd);
}

DfBisection df_bisect(const arma::cx_vec &v_in, const arma::cx_vec &z, const SystemParams &params,
                      const ChannelSet &ch, arma::uword c2, const arma::cx_mat *q_hint, double ps_hint)
{
    if (c2 < 1)
        throw std::invalid_argument("df_bisect: need at least one bisection step");

    DfBisection out;
    double lo = 0.0;
    double hi = df_zeta_upper_bound(params, ch);

    // zeta = 0 is always feasible with the trivial witness (Q, P_s) = (0, 0).
    out.q = arma::cx_mat(params.mt, params.mt, arma::fill::zeros);
    out.ps = 0.0;

    arma::cx_mat hint = (q_hint != nullptr) ? *q_hint : out.q;
    double hint_ps = (ps_hint >= 0.0) ? ps_hint : 0.0;

    for (arma::uword step = 0; step < c2; ++step)
    {
        const double mid = 0.5 * (lo + hi);
        const DfWitness w = df_feasible(mid, v_in, z, params, ch, &hint, hint_ps);
        if (w.feasible)
        {
            lo = mid;
            out.q = w.q;
            out.ps = w.ps;
            hint = w.q;
            hint_ps = w.ps;
        }
        else
        {
            hi = mid;
        }
        out.zeta_trace.push_back(lo);
    }
    out.zeta = lo;
    return out;
}

namespace
{

// Rank-1 extraction with re-verification; falls back to the exact rank-1
// p-interval search along analytic candidate directions.
arma::cx_mat extract_rank1(double zeta, const arma::cx_mat &q_witness, double ps, const arma::cx_vec &v_in,
                           const arma::cx_vec &z, const SystemParams &params, const ChannelSet &ch)
{
    const double cap = params.pr_cap_undistorted();
    const SlackModel m = build_slacks(zeta, v_in, z, params, ch);

    const HermEig eig = herm_eig(q_witness);
    if (eig.values(0) <= 0.0)
        return arma::cx_mat(params.mt, params.mt, arma::fill::zeros);

    arma::cx_mat q1 = eig.values(0) * eig.vectors.col(0) * eig.vectors.col(0).t();
    if (m.min_slack(q1, ps) >= feasibility_slack)
        return q1;

    std::vector<arma::cx_vec> directions;
    directions.push_back(eig.vectors.col(0));
    directions.push_back(herm_eig(m.phi_rd).vectors.col(0));
    {
        // Direction trading distortion leakage against delivered power: the
        // generalized dominant direction of phi_rd against -phi_sr.
        const double reg = 1e-12 * std::max(1.0, arma::norm(m.phi_sr, "fro"));
        const arma::cx_mat neg =
            -m.phi_sr + reg * arma::eye<arma::cx_mat>(params.mt, params.mt);
        const arma::cx_mat ni = herm_inv_sqrt(neg);
        directions.push_back(ni * herm_eig(ni * m.phi_rd * ni).vectors.col(0));
    }

    for (auto &u : directions)
    {
        const double nrm = arma::norm(u, 2);
        if (nrm == 0.0)
            continue;
        u /= nrm;
        const double p = rank1_interval(m, u, ps, cap);
        if (p >= 0.0)
            return p * u * u.t();
    }
    // No verified rank-1 point found; return the dominant component anyway.
    return q1;
}

} // namespace

DfResult df_optimize(const SystemParams &params, const ChannelSet &ch, arma::uword c_df, arma::uword c2,
                     double c1)
{
    params.validate();
    ch.validate(params);

    const double cap = params.pr_cap_undistorted();

    DfResult res;
    res.design.ps = params.ps_max * 1e-2;

    // Maximum-ratio transmission start at full relay power.
    const HermEig mrt = herm_eig(ch.h_rd.t() * ch.h_rd);
    res.design.v_out = std::sqrt(cap) * mrt.vectors.col(0);
    res.design.q = res.design.v_out * res.design.v_out.t();

    double zeta_prev = 0.0;
    arma::cx_mat witness_q = res.design.q;
    double witness_ps = res.design.ps;

    for (arma::uword it = 0; it < c_df; ++it)
    {
        const DfFilters f = df_filters(res.design.q, res.design.ps, params, ch);
        res.design.v_in = f.v_in;
        res.design.z = f.z;

        DfBisection b = df_bisect(res.design.v_in, res.design.z, params, ch, c2, &witness_q, witness_ps);

        // The filter updates can only improve both link quotients, so the
        // previous witness stays valid; never step below it.
        if (b.zeta < zeta_prev)
        {
            b.zeta = zeta_prev;
            b.q = witness_q;
            b.ps = witness_ps;
        }

        res.design.ps = b.ps;
        res.design.q = extract_rank1(b.zeta, b.q, b.ps, res.design.v_in, res.design.z, params, ch);
        witness_q = res.design.q;
        witness_ps = b.ps;

        res.outer_zetas.push_back(b.zeta);
        ++res.iterations;
        const double improvement = b.zeta - zeta_prev;
        zeta_prev = b.zeta;
        if (it > 0 && improvement < c1)
            break;
    }

    const HermEig eig = herm_eig(res.design.q);
    res.design.v_out = (eig.values(0) > 0.0) ? arma::cx_vec(std::sqrt(eig.values(0)) * eig.vectors.col(0))
                                             : arma::cx_vec(params.mt, arma::fill::zeros);
    res.zeta = zeta_prev;
    res.rate = std::log2(1.0 + res.zeta);
    return res;
}

} // namespace fdr
