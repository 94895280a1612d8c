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
#include "scalar_relay.hpp"
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fdr;

namespace
{

// Distortion-plus-noise power summed over destination antennas; the exact
// counterpart of the trace-mode polynomial f1's denominator.
double exact_trace_sdnr(double omega, const arma::cx_vec &w_tx, const arma::cx_vec &w_rx,
                        const SystemParams &p, const ChannelSet &ch)
{
    const arma::cx_mat w = std::sqrt(omega) * w_tx * w_rx.t();
    const LoopKernels k = build_kernels(p, ch, p.ps_max);
    const arma::cx_mat q = relay_q(w, k);
    const double p_des = p.ps_max * std::pow(arma::norm(ch.h_rd * w * ch.h_sr, 2), 2);
    const double p_tot = std::real(arma::trace(ch.h_rd * tx_covariance(q, p.kappa) * ch.h_rd.t())) +
                         p.sigma2_nd * static_cast<double>(p.md) +
                         p.ps_max * std::pow(arma::norm(ch.h_sd, 2), 2);
    return p_des / (p_tot - p_des);
}

double exact_relay_power(double omega, const arma::cx_vec &w_tx, const arma::cx_vec &w_rx,
                         const SystemParams &p, const ChannelSet &ch)
{
    const arma::cx_mat w = std::sqrt(omega) * w_tx * w_rx.t();
    const LoopKernels k = build_kernels(p, ch, p.ps_max);
    return (1.0 + p.kappa) * std::real(arma::trace(relay_q(w, k)));
}

} // namespace

TEST_CASE("distortion_channel_tx: zero case, scalar norm and the power identity")
{
    RngStream rng(201);

    SECTION("kappa = beta = 0 gives the zero matrix")
    {
        SystemParams p = test::default_params(2);
        p.kappa = 0.0;
        p.beta = 0.0;
        const ChannelSet ch = test::draw(p, 50, 0);
        REQUIRE(arma::abs(distortion_channel_tx(p, ch)).max() == 0.0);
    }

    SECTION("scalar squared norm")
    {
        SystemParams p = test::default_params(1);
        p.kappa = 0.04;
        p.beta = 0.02;
        const ChannelSet ch = test::draw(p, 51, 0);
        const arma::cx_mat h_d = distortion_channel_tx(p, ch);
        const double expected = p.kappa * (std::norm(ch.h_rr(0, 0)) + std::norm(ch.h_rd(0, 0))) +
                                p.beta * std::norm(ch.h_rr(0, 0));
        REQUIRE(std::pow(arma::norm(h_d, "fro"), 2) == Catch::Approx(expected).epsilon(1e-12));
    }

    SECTION("||H_Dtx w||^2 equals the term-by-term distortion sum")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.01;
        p.beta = 0.005;
        const ChannelSet ch = test::draw(p, 52, 0);
        const arma::cx_mat h_d = distortion_channel_tx(p, ch);
        for (int trial = 0; trial < 50; ++trial)
        {
            arma::cx_vec w = rng.cgaussian_matrix(3, 1);
            w /= arma::norm(w, 2);
            const arma::cx_mat outer = w * w.t();
            const double by_sum =
                p.kappa * std::real(arma::trace(ch.h_rr * arma::diagmat(outer.diag()) * ch.h_rr.t())) +
                p.kappa * std::real(arma::trace(ch.h_rd * arma::diagmat(outer.diag()) * ch.h_rd.t())) +
                p.beta * std::real(arma::trace(arma::diagmat(
                             arma::cx_mat(ch.h_rr * outer * ch.h_rr.t()).diag())));
            REQUIRE(std::pow(arma::norm(h_d * w, 2), 2) == Catch::Approx(by_sum).epsilon(1e-12));
        }
    }
}

TEST_CASE("design_wtx: quotient maximizer")
{
    RngStream rng(202);

    SECTION("distortion-free, no direct link: dominant right singular direction of H_rd")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.0;
        p.beta = 0.0;
        ChannelSet ch = test::draw(p, 53, 0);
        ch.h_sd.zeros();
        const arma::cx_vec w = design_wtx(p, ch);
        arma::cx_mat u, v;
        arma::vec s;
        REQUIRE(arma::svd(u, s, v, ch.h_rd));
        const double align = std::abs(arma::cdot(w, v.col(0)));
        REQUIRE(align == Catch::Approx(1.0).margin(1e-9));
    }

    SECTION("dominates 1000 random unit vectors")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.01;
        p.beta = 0.01;
        const ChannelSet ch = test::draw(p, 54, 0);
        const arma::cx_mat h_d = distortion_channel_tx(p, ch);
        const double n_tx =
            (p.md * p.sigma2_nd + p.ps_max * std::pow(arma::norm(ch.h_sd, 2), 2)) / p.pr_max;
        auto quotient = [&](const arma::cx_vec &w) {
            const double num = std::pow(arma::norm(ch.h_rd * w, 2), 2);
            const double den = std::pow(arma::norm(h_d * w, 2), 2) + n_tx;
            return num / den;
        };
        const arma::cx_vec w_star = design_wtx(p, ch);
        REQUIRE(arma::norm(w_star, 2) == Catch::Approx(1.0).margin(1e-12));
        const double best = quotient(w_star);
        for (int i = 0; i < 1000; ++i)
        {
            arma::cx_vec w = rng.cgaussian_matrix(3, 1);
            w /= arma::norm(w, 2);
            REQUIRE(best >= quotient(w) * (1.0 - 1e-10));
        }
    }

    SECTION("Mt = 1 returns the unit scalar")
    {
        SystemParams p = test::default_params(2);
        p.mt = 1;
        RngStream r = RngStream::substream(55, 0, 1);
        const ChannelSet ch = draw_channels(r, p, test::default_fading());
        const arma::cx_vec w = design_wtx(p, ch);
        REQUIRE(w.n_elem == 1);
        REQUIRE(std::abs(w(0) - cxd(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("design_wrx: closed-form quotient maximizer")
{
    RngStream rng(203);

    SECTION("kappa = beta = 0 is the matched filter")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.0;
        p.beta = 0.0;
        const ChannelSet ch = test::draw(p, 56, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const double align = std::abs(arma::cdot(w_rx, ch.h_sr)) / arma::norm(ch.h_sr, 2);
        REQUIRE(align == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("dominates 1000 random unit vectors")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.02;
        p.beta = 0.01;
        const ChannelSet ch = test::draw(p, 57, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_mat outer = w_tx * w_tx.t();
        const arma::cx_mat phi =
            p.kappa * p.pr_max * ch.h_rr * arma::diagmat(outer.diag()) * ch.h_rr.t() +
            p.beta * p.pr_max *
                arma::diagmat(arma::cx_mat(ch.h_rr * outer * ch.h_rr.t()).diag());
        auto quotient = [&](const arma::cx_vec &w) {
            const double num = std::norm(arma::cdot(w, ch.h_sr));
            const double den = std::real(arma::cdot(
                w, (phi + p.sigma2_nr * arma::eye<arma::cx_mat>(3, 3)) * w));
            return num / den;
        };
        const arma::cx_vec w_star = design_wrx(p, ch, w_tx);
        const double best = quotient(w_star);
        for (int i = 0; i < 1000; ++i)
        {
            arma::cx_vec w = rng.cgaussian_matrix(3, 1);
            w /= arma::norm(w, 2);
            REQUIRE(best >= quotient(w) * (1.0 - 1e-10));
        }
    }

    SECTION("Mr = 1 returns the unit scalar")
    {
        SystemParams p = test::default_params(2);
        p.mr = 1;
        RngStream r = RngStream::substream(58, 0, 1);
        const ChannelSet ch = draw_channels(r, p, test::default_fading());
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        REQUIRE(w_rx.n_elem == 1);
        REQUIRE(std::abs(w_rx(0) - cxd(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("omega_coeffs: structure and accuracy against the loop model")
{
    SECTION("distortion-free: higher coefficients vanish, power linear")
    {
        SystemParams p = test::default_params(2);
        p.kappa = 0.0;
        p.beta = 0.0;
        const ChannelSet ch = test::draw(p, 60, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
        for (arma::uword k = 1; k < 5; ++k)
        {
            REQUIRE(c.a_raw(k) == 0.0);
            REQUIRE(c.b(k) == 0.0);
        }
        REQUIRE(c.b(0) > 0.0);
    }

    SECTION("f2 within 1% and f1 within 2% up to 0.8 omega_max at K = 5")
    {
        const SystemParams p = test::default_params(3);
        const ChannelSet ch = test::draw(p, 61, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
        const OmegaSolution sol = solve_omega(c, p.pr_max);
        for (int i = 1; i <= 10; ++i)
        {
            const double omega = 0.8 * sol.omega_max * i / 10.0;
            REQUIRE(c.f2(omega) ==
                    Catch::Approx(exact_relay_power(omega, w_tx, w_rx, p, ch)).epsilon(0.01));
            REQUIRE(c.f1(omega) ==
                    Catch::Approx(exact_trace_sdnr(omega, w_tx, w_rx, p, ch)).epsilon(0.02));
        }
    }

    SECTION("coefficients are non-negative and the Neumann condition holds at omega*")
    {
        for (int trial = 0; trial < 10; ++trial)
        {
            SystemParams p = test::default_params(3);
            p.kappa = 0.02;
            p.beta = 0.02;
            const ChannelSet ch = test::draw(p, 62, trial);
            const arma::cx_vec w_tx = design_wtx(p, ch);
            const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
            const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
            REQUIRE(c.a_raw.min() > -1e-12);
            REQUIRE(c.b.min() > -1e-12);
            REQUIRE(c.a0 > 0.0);
            REQUIRE(c.a_d > 0.0);

            const OmegaSolution sol = solve_omega(c, p.pr_max);
            const LoopKernels k = build_kernels(p, ch, p.ps_max);
            const arma::cx_mat w = std::sqrt(sol.omega_star) * w_tx * w_rx.t();
            REQUIRE(loop_spectral_radius(w, k) < 1.0);
        }
    }
}

TEST_CASE("solve_omega: roots and the interior optimum")
{
    SECTION("linear power model has the exact cap root")
    {
        OmegaPolynomials p;
        p.a_d = 1.0;
        p.a0 = 2.0;
        p.a_raw = arma::vec{0.5, 0.0, 0.0, 0.0, 0.0};
        p.b = arma::vec{0.25, 0.0, 0.0, 0.0, 0.0};
        const OmegaSolution sol = solve_omega(p, 3.0);
        REQUIRE(sol.omega_max == 12.0); // exact, no bisection error
        REQUIRE(std::isinf(sol.omega_0));
        REQUIRE(sol.omega_star == 12.0);
    }

    SECTION("distortion-free channel amplifies to the power cap")
    {
        SystemParams p = test::default_params(2);
        p.kappa = 0.0;
        p.beta = 0.0;
        const ChannelSet ch = test::draw(p, 63, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
        const OmegaSolution sol = solve_omega(c, p.pr_max);
        REQUIRE(std::isinf(sol.omega_0));
        REQUIRE(sol.omega_star == sol.omega_max);
        REQUIRE(exact_relay_power(sol.omega_max, w_tx, w_rx, p, ch) ==
                Catch::Approx(p.pr_max).epsilon(1e-9));
    }

    SECTION("f1 at omega* dominates a fine grid")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.05; // strong distortion puts the optimum in the interior
        p.beta = 0.05;
        const ChannelSet ch = test::draw(p, 64, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
        const OmegaSolution sol = solve_omega(c, p.pr_max);
        const double best = c.f1(sol.omega_star);
        for (int i = 1; i <= 1000; ++i)
        {
            const double omega = sol.omega_max * i / 1000.0;
            REQUIRE(best >= c.f1(omega) * (1.0 - 1e-9));
        }
    }

    SECTION("stationarity RHS is monotone: at most one sign change")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.03;
        p.beta = 0.03;
        const ChannelSet ch = test::draw(p, 65, 0);
        const arma::cx_vec w_tx = design_wtx(p, ch);
        const arma::cx_vec w_rx = design_wrx(p, ch, w_tx);
        const OmegaPolynomials c = omega_coeffs(p, ch, w_tx, w_rx, 5);
        const OmegaSolution sol = solve_omega(c, p.pr_max);
        int sign_changes = 0;
        bool prev = c.stationarity_rhs(sol.omega_max * 1e-6) >= c.a0;
        for (int i = -5; i <= 5; ++i)
        {
            const double omega = sol.omega_max * std::pow(10.0, i / 2.5);
            const bool now = c.stationarity_rhs(omega) >= c.a0;
            if (now != prev)
                ++sign_changes;
            prev = now;
        }
        REQUIRE(sign_changes <= 1);
    }

    SECTION("zero power model is rejected")
    {
        OmegaPolynomials p;
        p.a_d = 1.0;
        p.a0 = 1.0;
        p.a_raw = arma::vec{1.0, 0.0};
        p.b = arma::vec{0.0, 0.0};
        REQUIRE_THROWS_AS(solve_omega(p, 1.0), std::invalid_argument);
    }
}

TEST_CASE("mustr1: feasibility and the scalar reduction")
{
    SECTION("relay power respects the cap")
    {
        for (int trial = 0; trial < 5; ++trial)
        {
            SystemParams p = test::default_params(3);
            p.kappa = 0.03;
            p.beta = 0.03;
            const ChannelSet ch = test::draw(p, 66, trial);
            const Rank1Result res = mustr1(p, ch);
            REQUIRE(res.report.relay_power <= p.pr_max + 1e-6);
            REQUIRE(res.report.loop_spectral_radius < 1.0);
            REQUIRE(arma::norm(res.design.w_tx, 2) == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(arma::norm(res.design.w_rx, 2) == Catch::Approx(1.0).margin(1e-12));
        }
    }

    SECTION("scalar system tracks the closed-form scalar gain within 2%")
    {
        RngStream rng(204);
        for (int trial = 0; trial < 10; ++trial)
        {
            SystemParams p = test::default_params(1);
            p.kappa = 0.03;
            p.beta = 0.02;
            p.sigma2_nr = 1e-3;
            p.sigma2_nd = 1e-3;
            ChannelSet ch;
            ch.h_sr = arma::cx_vec{rng.cgaussian()};
            ch.h_rd = arma::cx_mat(1, 1);
            ch.h_rd(0, 0) = rng.cgaussian();
            ch.h_sd = arma::cx_vec{cxd(0.0, 0.0)};
            ch.h_rr = arma::cx_mat(1, 1);
            ch.h_rr(0, 0) = 0.8 * rng.cgaussian();

            ScalarNode node;
            node.h_sr = ch.h_sr(0);
            node.h_rr_est = ch.h_rr(0, 0);
            node.h_rd = {ch.h_rd(0, 0)};
            node.w_n = {p.sigma2_nd};
            node.relay_noise = p.sigma2_nr;
            node.gamma = p.kappa;
            node.beta = p.beta;
            node.p_relay = p.pr_max;
            node.ps = p.ps_max;
            const ScalarSolution ref = optimal_gain(node);

            const Rank1Result res = mustr1(p, ch);
            REQUIRE(res.design.omega == Catch::Approx(ref.a_tilde).epsilon(0.02));
        }
    }
}

TEST_CASE("mustr1 tracks the GP optimum when the distortion-aware terms vanish")
{
    // With perfect hardware and no direct link both designs approach the
    // distortion-free optimum structure.
    int close = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial)
    {
        SystemParams p = test::default_params(2);
        p.kappa = 0.0;
        p.beta = 0.0;
        ChannelSet ch = test::draw(p, 71, trial);
        ch.h_sd.zeros();

        const Rank1Result r1 = mustr1(p, ch);
        GpConfig cfg;
        cfg.inits = 4;
        cfg.max_iters = 200;
        cfg.c1 = 1e-8;
        RngStream rng = RngStream::substream(71, trial, 5);
        const GpResult gp = gp_optimize(p, ch, cfg, rng);
        if (std::abs(gp.report.sdnr - r1.report.sdnr) <= 0.05 * gp.report.sdnr)
            ++close;
    }
    REQUIRE(close >= trials - 2);
}

TEST_CASE("alt_mustr1: best-iterate contract and convergence speed")
{
    SECTION("never worse than MuStR1 on any realization")
    {
        for (int trial = 0; trial < 10; ++trial)
        {
            const SystemParams p = test::default_params(3);
            const ChannelSet ch = test::draw(p, 67, trial);
            const Rank1Result base = mustr1(p, ch);
            const Rank1Result alt = alt_mustr1(p, ch);
            REQUIRE(alt.report.sdnr >= base.report.sdnr * (1.0 - 1e-12));
            REQUIRE(alt.report.relay_power <= p.pr_max + 1e-6);
        }
    }

    SECTION("mean iteration count to convergence stays small")
    {
        double total = 0.0;
        const int trials = 20;
        for (int trial = 0; trial < trials; ++trial)
        {
            const SystemParams p = test::default_params(3);
            const ChannelSet ch = test::draw(p, 68, trial);
            total += static_cast<double>(alt_mustr1(p, ch, default_poly_order, 50, 1e-4).iterations);
        }
        REQUIRE(total / trials <= 20.0);
    }
}

TEST_CASE("mrc_mrt_design: matched filters with power adjustment")
{
    SECTION("coincides with MuStR1 when distortion-free")
    {
        SystemParams p = test::default_params(3);
        p.kappa = 0.0;
        p.beta = 0.0;
        const ChannelSet ch = test::draw(p, 69, 0);
        const Rank1Result a = mrc_mrt_design(p, ch);
        const Rank1Result b = mustr1(p, ch);
        REQUIRE(a.report.sdnr == Catch::Approx(b.report.sdnr).epsilon(1e-9));
    }

    SECTION("receive filter is matched to h_sr")
    {
        const SystemParams p = test::default_params(3);
        const ChannelSet ch = test::draw(p, 70, 0);
        const Rank1Result res = mrc_mrt_design(p, ch);
        const double align =
            std::abs(arma::cdot(res.design.w_rx, ch.h_sr)) / arma::norm(ch.h_sr, 2);
        REQUIRE(align == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(res.report.relay_power <= p.pr_max + 1e-6);
    }
}
