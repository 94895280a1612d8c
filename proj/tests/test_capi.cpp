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

#include <fdrelay.h>

#include "harness.hpp"
#include "scalar_relay.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

namespace
{

struct ConfigGuard
{
    fdr_config *ptr = nullptr;
    ~ConfigGuard() { fdr_config_destroy(ptr); }
};

std::string temp_path(const std::string &name)
{
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
}

} // namespace

TEST_CASE("capi: version and error reporting")
{
    REQUIRE(std::string(fdr_version()) == "1.0.0");
    REQUIRE(fdr_config_create(nullptr) == FDR_EINVAL);
    REQUIRE(std::string(fdr_last_error()).size() > 0);
}

TEST_CASE("capi: config lifecycle and key validation")
{
    ConfigGuard cfg;
    REQUIRE(fdr_config_create(&cfg.ptr) == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "kappa_db", "-30") == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "m", "2") == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "no_such_key", "1") == FDR_EINVAL);
    REQUIRE(fdr_config_set(cfg.ptr, "kappa_db", "not-a-number") == FDR_EINVAL);
    REQUIRE(fdr_config_load("/nonexistent/path.cfg", &cfg.ptr) == FDR_EINVAL);

    // Loading from a file matches the in-memory parser.
    const std::string path = temp_path("fdrelay_capi_cfg.txt");
    {
        std::ofstream out(path);
        out << "seed = 9\nm = 2\nmethods = mustr1\nn_realizations = 1\n";
    }
    ConfigGuard loaded;
    REQUIRE(fdr_config_load(path.c_str(), &loaded.ptr) == FDR_OK);
    std::remove(path.c_str());
}

TEST_CASE("capi: single design run matches the core library")
{
    ConfigGuard cfg;
    REQUIRE(fdr_config_create(&cfg.ptr) == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "m", "2") == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "seed", "5") == FDR_OK);

    fdr_design_metrics metrics{};
    REQUIRE(fdr_design_run(cfg.ptr, 0, FDR_METHOD_MUSTR1, &metrics) == FDR_OK);
    REQUIRE(metrics.sdnr > 0.0);
    REQUIRE(metrics.rate_bps_hz == Catch::Approx(std::log2(1.0 + metrics.sdnr)).margin(1e-12));

    // Same numbers straight from the core.
    fdr::ExperimentConfig core = fdr::default_config();
    core.seed = 5;
    core.params.mt = core.params.mr = core.params.md = 2;
    const fdr::SweptSetup setup = fdr::apply_sweep(core, "none", 0.0);
    const fdr::ResultRecord rec = fdr::run_single(core, setup, 0, 0, fdr::Method::MuStR1);
    REQUIRE(metrics.sdnr == Catch::Approx(rec.sdnr).epsilon(1e-14));
    REQUIRE(metrics.relay_power_w == Catch::Approx(rec.relay_power_w).epsilon(1e-14));
}

TEST_CASE("capi: experiment run writes records and a summary")
{
    ConfigGuard cfg;
    REQUIRE(fdr_config_create(&cfg.ptr) == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "m", "2") == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "n_realizations", "2") == FDR_OK);
    REQUIRE(fdr_config_set(cfg.ptr, "methods", "mustr1,mrc-mrt") == FDR_OK);

    const std::string path = temp_path("fdrelay_capi_out.csv");
    fdr_run_options opts{};
    opts.deterministic_timing = 1;

    char *summary = nullptr;
    REQUIRE(fdr_experiment_run(cfg.ptr, path.c_str(), "csv", &opts, &summary) == FDR_OK);
    REQUIRE(summary != nullptr);
    REQUIRE(std::string(summary).find("MuStR1") != std::string::npos);
    fdr_string_free(summary);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    REQUIRE(header.rfind("seed,realization,method", 0) == 0);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            ++lines;
    REQUIRE(lines == 4); // 2 realizations x 2 methods
    std::remove(path.c_str());

    REQUIRE(fdr_experiment_run(cfg.ptr, "/nonexistent-dir/x.csv", "csv", &opts, nullptr) == FDR_EIO);
    REQUIRE(fdr_experiment_run(cfg.ptr, path.c_str(), "xml", &opts, nullptr) == FDR_EINVAL);

    fdr_run_options sweep_opts{};
    sweep_opts.deterministic_timing = 1;
    sweep_opts.sweep_axis = "kappa_db";
    sweep_opts.sweep_values = "-40,-20";
    REQUIRE(fdr_experiment_run(cfg.ptr, path.c_str(), "csv", &sweep_opts, nullptr) == FDR_OK);
    std::ifstream in2(path);
    std::size_t lines2 = 0;
    while (std::getline(in2, line))
        if (!line.empty())
            ++lines2;
    REQUIRE(lines2 == 1 + 2 * 4); // header + 2 sweep values x 2 realizations x 2 methods
    std::remove(path.c_str());
}

TEST_CASE("capi: scalar relay selection")
{
    const double h_rd_re[1] = {0.9};
    const double h_rd_im[1] = {-0.1};
    const double noise[1] = {1e-3};

    fdr_scalar_node node{};
    node.h_sr_re = 1.1;
    node.h_sr_im = 0.2;
    node.h_rr_est_re = 0.4;
    node.h_rr_est_im = -0.3;
    node.err_radius = 0.05;
    node.h_rd_re = h_rd_re;
    node.h_rd_im = h_rd_im;
    node.noise_w = noise;
    node.n_dest = 1;
    node.relay_noise_w = 1e-3;
    node.beta = 0.01;
    node.gamma = 0.02;
    node.p_relay_w = 1.0;
    node.ps_w = 1.0;

    fdr_scalar_solution sol{};
    REQUIRE(fdr_scalar_optimal_gain(&node, &sol) == FDR_OK);
    REQUIRE(sol.gain > 0.0);
    REQUIRE(sol.senr > 0.0);

    // Against the core closed form.
    fdr::ScalarNode core;
    core.h_sr = {1.1, 0.2};
    core.h_rr_est = {0.4, -0.3};
    core.zeta_err = 0.05;
    core.h_rd = {{0.9, -0.1}};
    core.w_n = {1e-3};
    core.relay_noise = 1e-3;
    core.beta = 0.01;
    core.gamma = 0.02;
    core.p_relay = 1.0;
    core.ps = 1.0;
    const fdr::ScalarSolution ref = fdr::optimal_gain(core);
    REQUIRE(sol.gain == Catch::Approx(ref.a_tilde).epsilon(1e-14));
    REQUIRE(sol.senr == Catch::Approx(ref.senr).epsilon(1e-14));

    // Two-node selection: a stronger copy must win.
    fdr_scalar_node stronger = node;
    stronger.h_sr_re *= 2.0;
    stronger.h_sr_im *= 2.0;
    const fdr_scalar_node nodes[2] = {node, stronger};
    size_t idx = 99;
    REQUIRE(fdr_scalar_select_relay(nodes, 2, &idx, &sol) == FDR_OK);
    REQUIRE(idx == 1);

    REQUIRE(fdr_scalar_optimal_gain(nullptr, &sol) == FDR_EINVAL);
    fdr_scalar_node bad = node;
    bad.n_dest = 0;
    REQUIRE(fdr_scalar_optimal_gain(&bad, &sol) == FDR_EINVAL);
}
