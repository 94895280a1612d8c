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
#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace fdr;

TEST_CASE("df_link_sdnrs: degenerate and invariance cases")
{
    RngStream rng(301);
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 80, 0);

    DfDesign d;
    d.ps = 0.7;
    d.v_in = rng.cgaussian_matrix(3, 1);
    d.z = rng.cgaussian_matrix(3, 1);
    d.q = arma::cx_mat(3, 3, arma::fill::zeros);
    d.v_out = arma::cx_vec(3, arma::fill::zeros);

    SECTION("Q = 0: second hop carries nothing")
    {
        const DfLinkSdnrs s = df_link_sdnrs(d, p, ch);
        const double expected_sr = d.ps * std::norm(arma::cdot(d.v_in, ch.h_sr)) /
                                   (p.sigma2_nr * std::pow(arma::norm(d.v_in, 2), 2));
        REQUIRE(s.zeta_sr == Catch::Approx(expected_sr).epsilon(1e-12));
        REQUIRE(s.zeta_rd == 0.0);
    }

    SECTION("distortion-free first hop ignores Q")
    {
        SystemParams p0 = p;
        p0.kappa = 0.0;
        p0.beta = 0.0;
        DfDesign d2 = d;
        const arma::cx_mat g = rng.cgaussian_matrix(3, 3);
        d2.q = g * g.t();
        const double with_q = df_link_sdnrs(d2, p0, ch).zeta_sr;
        d2.q.zeros();
        const double without_q = df_link_sdnrs(d2, p0, ch).zeta_sr;
        REQUIRE(with_q == Catch::Approx(without_q).epsilon(1e-12));
    }

    SECTION("both quotients are scale invariant")
    {
        DfDesign d2 = d;
        const arma::cx_mat g = rng.cgaussian_matrix(3, 1);
        d2.q = g * g.t();
        const DfLinkSdnrs base = df_link_sdnrs(d2, p, ch);
        d2.v_in *= cxd(2.0, -3.0);
        d2.z *= cxd(-0.4, 0.9);
        const DfLinkSdnrs scaled = df_link_sdnrs(d2, p, ch);
        REQUIRE(scaled.zeta_sr == Catch::Approx(base.zeta_sr).epsilon(1e-12));
        REQUIRE(scaled.zeta_rd == Catch::Approx(base.zeta_rd).epsilon(1e-12));
    }
}

TEST_CASE("df_filters: closed forms dominate random filters")
{
    RngStream rng(302);
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 81, 0);

    arma::cx_vec v_out = rng.cgaussian_matrix(3, 1);
    v_out *= std::sqrt(p.pr_cap_undistorted()) / arma::norm(v_out, 2);
    const arma::cx_mat q = v_out * v_out.t();
    const double ps = 0.5;

    const DfFilters f = df_filters(q, ps, p, ch);

    DfDesign d;
    d.ps = ps;
    d.q = q;
    d.v_out = v_out;
    d.v_in = f.v_in;
    d.z = f.z;
    const DfLinkSdnrs best = df_link_sdnrs(d, p, ch);

    for (int i = 0; i < 500; ++i)
    {
        DfDesign trial = d;
        trial.v_in = rng.cgaussian_matrix(3, 1);
        trial.z = rng.cgaussian_matrix(3, 1);
        const DfLinkSdnrs s = df_link_sdnrs(trial, p, ch);
        REQUIRE(best.zeta_sr >= s.zeta_sr * (1.0 - 1e-10));
        REQUIRE(best.zeta_rd >= s.zeta_rd * (1.0 - 1e-10));
    }

    SECTION("distortion-free, no direct link: matched filter at the destination")
    {
        SystemParams p0 = p;
        p0.kappa = 0.0;
        p0.beta = 0.0;
        ChannelSet ch0 = ch;
        ch0.h_sd.zeros();
        const DfFilters f0 = df_filters(q, ps, p0, ch0);
        const arma::cx_vec matched = ch0.h_rd * v_out;
        const double align =
            std::abs(arma::cdot(f0.z, matched)) / (arma::norm(f0.z, 2) * arma::norm(matched, 2));
        REQUIRE(align == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("constraint slacks encode the link quotients")
{
    // tr(Psi + Phi Q) >= 0 must hold exactly when the corresponding link
    // quotient reaches the target.
    RngStream rng(399);
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 79, 0);

    for (int trial = 0; trial < 20; ++trial)
    {
        DfDesign d;
        d.ps = p.ps_max * rng.uniform();
        d.v_in = rng.cgaussian_matrix(3, 1);
        d.z = rng.cgaussian_matrix(3, 1);
        arma::cx_vec g = rng.cgaussian_matrix(3, 1);
        d.q = (p.pr_cap_undistorted() * rng.uniform()) * g * g.t() / std::pow(arma::norm(g, 2), 2);

        const DfLinkSdnrs s = df_link_sdnrs(d, p, ch);
        for (const double zeta : {0.5 * s.zeta_sr, 2.0 * s.zeta_sr, 0.5 * s.zeta_rd, 2.0 * s.zeta_rd})
        {
            const auto [slack_sr, slack_rd] =
                df_constraint_slacks(zeta, d.q, d.ps, d.v_in, d.z, p, ch);
            REQUIRE((slack_sr >= 0.0) == (s.zeta_sr >= zeta * (1.0 - 1e-12)));
            REQUIRE((slack_rd >= 0.0) == (s.zeta_rd >= zeta * (1.0 - 1e-12)));
        }
    }
}

TEST_CASE("df_feasible: trivial target, upper bound, nestedness")
{
    RngStream rng(303);
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 82, 0);

    arma::cx_vec v_out = rng.cgaussian_matrix(3, 1);
    v_out *= std::sqrt(p.pr_cap_undistorted()) / arma::norm(v_out, 2);
    const DfFilters f = df_filters(v_out * v_out.t(), 0.5, p, ch);

    SECTION("zeta = 0 is feasible with the trivial witness")
    {
        const DfWitness w = df_feasible(0.0, f.v_in, f.z, p, ch);
        REQUIRE(w.feasible);
        const auto [s_sr, s_rd] = df_constraint_slacks(0.0, arma::cx_mat(3, 3, arma::fill::zeros), 0.0,
                                                       f.v_in, f.z, p, ch);
        REQUIRE(s_sr >= 0.0);
        REQUIRE(s_rd >= 0.0);
    }

    SECTION("targets above the distortion-free bound are infeasible")
    {
        const double bound = df_zeta_upper_bound(p, ch);
        const DfWitness w = df_feasible(bound * 1.01, f.v_in, f.z, p, ch);
        REQUIRE_FALSE(w.feasible);
    }

    SECTION("a feasible witness stays valid at half the target")
    {
        const double bound = df_zeta_upper_bound(p, ch);
        double zeta = bound / 4.0;
        DfWitness w = df_feasible(zeta, f.v_in, f.z, p, ch);
        for (int halving = 0; halving < 4 && !w.feasible; ++halving)
        {
            zeta *= 0.5;
            w = df_feasible(zeta, f.v_in, f.z, p, ch);
        }
        REQUIRE(w.feasible);
        const auto [s_sr, s_rd] = df_constraint_slacks(zeta / 2.0, w.q, w.ps, f.v_in, f.z, p, ch);
        REQUIRE(s_sr >= -1e-8);
        REQUIRE(s_rd >= -1e-8);
    }
}

TEST_CASE("df_bisect: nested intervals and verified witness")
{
    RngStream rng(304);
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 83, 0);

    arma::cx_vec v_out = rng.cgaussian_matrix(3, 1);
    v_out *= std::sqrt(p.pr_cap_undistorted()) / arma::norm(v_out, 2);
    const DfFilters f = df_filters(v_out * v_out.t(), 0.5, p, ch);

    const arma::uword c2 = 16;
    const DfBisection b = df_bisect(f.v_in, f.z, p, ch, c2);

    REQUIRE(b.zeta_trace.size() == c2);
    for (std::size_t i = 1; i < b.zeta_trace.size(); ++i)
        REQUIRE(b.zeta_trace[i] >= b.zeta_trace[i - 1]);
    REQUIRE(b.zeta == b.zeta_trace.back());

    // Witness verification at the returned target.
    const auto [s_sr, s_rd] = df_constraint_slacks(b.zeta, b.q, b.ps, f.v_in, f.z, p, ch);
    REQUIRE(s_sr >= -1e-8);
    REQUIRE(s_rd >= -1e-8);
    REQUIRE(std::real(arma::trace(b.q)) <= p.pr_cap_undistorted() + 1e-8);
    REQUIRE(b.ps >= 0.0);
    REQUIRE(b.ps <= p.ps_max + 1e-12);

    // Bisection pins zeta within zeta_max / 2^C2 of the apparent boundary.
    const double width = df_zeta_upper_bound(p, ch) * std::pow(0.5, static_cast<double>(c2));
    const DfWitness above = df_feasible(b.zeta + 4.0 * width, f.v_in, f.z, p, ch, &b.q, b.ps);
    if (above.feasible)
    {
        // Boundary is further up: the trace must then have been feasible all
        // the way, i.e. the last step was an accepting one.
        REQUIRE(b.zeta_trace.back() > b.zeta_trace.front());
    }
}

TEST_CASE("df_optimize: monotone target, rank-1 output, feasible design")
{
    const SystemParams p = test::default_params(3);
    const ChannelSet ch = test::draw(p, 84, 0);

    const DfResult res = df_optimize(p, ch, 8, 18, 1e-5);

    for (std::size_t i = 1; i < res.outer_zetas.size(); ++i)
        REQUIRE(res.outer_zetas[i] >= res.outer_zetas[i - 1] - 1e-12);

    REQUIRE(res.zeta > 0.0);
    REQUIRE(res.rate == Catch::Approx(std::log2(1.0 + res.zeta)).epsilon(1e-12));

    const HermEig eig = herm_eig(res.design.q);
    REQUIRE(eig.values(0) > 0.0);
    if (eig.values.n_elem > 1)
        REQUIRE(eig.values(1) / eig.values(0) < 1e-6);
    REQUIRE(std::real(arma::trace(res.design.q)) <= p.pr_cap_undistorted() + 1e-8);

    const auto [s_sr, s_rd] =
        df_constraint_slacks(res.zeta, res.design.q, res.design.ps, res.design.v_in, res.design.z, p, ch);
    REQUIRE(s_sr >= -1e-8);
    REQUIRE(s_rd >= -1e-8);
}

TEST_CASE("df_optimize: distortion-free scalar case reaches the min-link SNR")
{
    RngStream rng(305);
    for (int trial = 0; trial < 5; ++trial)
    {
        SystemParams p = test::default_params(1);
        p.kappa = 0.0;
        p.beta = 0.0;
        ChannelSet ch;
        ch.h_sr = arma::cx_vec{rng.cgaussian()};
        ch.h_rd = arma::cx_mat(1, 1);
        ch.h_rd(0, 0) = rng.cgaussian();
        ch.h_sd = arma::cx_vec{cxd(0.0, 0.0)};
        ch.h_rr = arma::cx_mat(1, 1);
        ch.h_rr(0, 0) = rng.cgaussian();

        const arma::uword c2 = 22;
        const DfResult res = df_optimize(p, ch, 6, c2, 1e-9);
        const double expected = std::min(p.ps_max * std::norm(ch.h_sr(0)) / p.sigma2_nr,
                                         p.pr_max * std::norm(ch.h_rd(0, 0)) / p.sigma2_nd);
        const double tol = expected * std::pow(0.5, static_cast<double>(c2) - 2);
        REQUIRE(std::abs(res.zeta - expected) <= tol + 1e-9 * expected);
    }
}
