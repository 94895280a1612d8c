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

#include "fdrelay.h"

#include "harness.hpp"
#include "scalar_relay.hpp"

#include <cstring>

namespace
{

thread_local std::string g_last_error;

fdr_status fail(fdr_status code, const std::string &message)
{
    g_last_error = message;
    return code;
}

template <typename Fn> fdr_status guarded(Fn &&fn)
{
    try
    {
        return fn();
    }
    catch (const fdr::config_error &e)
    {
        return fail(FDR_EINVAL, e.what());
    }
    catch (const std::invalid_argument &e)
    {
        return fail(FDR_EINVAL, e.what());
    }
    catch (const fdr::instability_error &e)
    {
        return fail(FDR_EUNSTABLE, e.what());
    }
    catch (const fdr::io_error &e)
    {
        return fail(FDR_EIO, e.what());
    }
    catch (const std::exception &e)
    {
        return fail(FDR_EINTERNAL, e.what());
    }
    catch (...)
    {
        return fail(FDR_EINTERNAL, "unknown failure");
    }
}

fdr::ScalarNode to_node(const fdr_scalar_node &n)
{
    if (n.h_rd_re == nullptr || n.h_rd_im == nullptr || n.noise_w == nullptr || n.n_dest == 0)
        throw std::invalid_argument("scalar node: destination arrays must be non-null and non-empty");
    fdr::ScalarNode node;
    node.h_sr = {n.h_sr_re, n.h_sr_im};
    node.h_rr_est = {n.h_rr_est_re, n.h_rr_est_im};
    node.zeta_err = n.err_radius;
    node.h_rd.reserve(n.n_dest);
    node.w_n.assign(n.noise_w, n.noise_w + n.n_dest);
    for (size_t i = 0; i < n.n_dest; ++i)
        node.h_rd.emplace_back(n.h_rd_re[i], n.h_rd_im[i]);
    node.relay_noise = n.relay_noise_w;
    node.beta = n.beta;
    node.gamma = n.gamma;
    node.p_relay = n.p_relay_w;
    node.ps = n.ps_w;
    return node;
}

fdr::Method to_method(fdr_method m)
{
    switch (m)
    {
    case FDR_METHOD_GP:
        return fdr::Method::Gp;
    case FDR_METHOD_MUSTR1:
        return fdr::Method::MuStR1;
    case FDR_METHOD_ALTMUSTR1:
        return fdr::Method::AltMuStR1;
    case FDR_METHOD_DF:
        return fdr::Method::Df;
    case FDR_METHOD_HD_AF:
        return fdr::Method::HdAf;
    case FDR_METHOD_MRC_MRT:
        return fdr::Method::MrcMrt;
    }
    throw std::invalid_argument("unknown method id");
}

} // namespace

extern "C"
{

struct fdr_config
{
    fdr::ExperimentConfig cfg;
};

const char *fdr_version(void)
{
    return "1.0.0";
}

const char *fdr_last_error(void)
{
    return g_last_error.c_str();
}

fdr_status fdr_config_create(fdr_config **out)
{
    if (out == nullptr)
        return fail(FDR_EINVAL, "output pointer is null");
    return guarded([&] {
        *out = new fdr_config{fdr::default_config()};
        return FDR_OK;
    });
}

fdr_status fdr_config_load(const char *path, fdr_config **out)
{
    if (path == nullptr || out == nullptr)
        return fail(FDR_EINVAL, "path and output pointer must be non-null");
    return guarded([&] {
        *out = new fdr_config{fdr::load_config(path)};
        return FDR_OK;
    });
}

fdr_status fdr_config_set(fdr_config *cfg, const char *key, const char *value)
{
    if (cfg == nullptr || key == nullptr || value == nullptr)
        return fail(FDR_EINVAL, "config, key and value must be non-null");
    return guarded([&] {
        fdr::apply_config_kv(cfg->cfg, key, value);
        cfg->cfg.params.validate();
        cfg->cfg.fading.validate();
        return FDR_OK;
    });
}

void fdr_config_destroy(fdr_config *cfg)
{
    delete cfg;
}

fdr_status fdr_design_run(const fdr_config *cfg, uint64_t realization, fdr_method method,
                          fdr_design_metrics *out)
{
    if (cfg == nullptr || out == nullptr)
        return fail(FDR_EINVAL, "config and output pointer must be non-null");
    return guarded([&] {
        fdr::ExperimentConfig run_cfg = cfg->cfg;
        run_cfg.sweep_param = "none";
        run_cfg.sweep_values = {0.0};
        const fdr::SweptSetup setup = fdr::apply_sweep(run_cfg, "none", 0.0);
        const fdr::ResultRecord rec =
            fdr::run_single(run_cfg, setup, 0, static_cast<arma::uword>(realization), to_method(method));
        out->sdnr = rec.sdnr;
        out->rate_bps_hz = rec.rate_bps_hz;
        out->relay_power_w = rec.relay_power_w;
        out->ps_w = rec.ps_w;
        out->iterations = rec.iterations;
        return FDR_OK;
    });
}

fdr_status fdr_experiment_run(const fdr_config *cfg, const char *out_path, const char *format,
                              const fdr_run_options *opts, char **summary_out)
{
    if (cfg == nullptr || out_path == nullptr || format == nullptr)
        return fail(FDR_EINVAL, "config, output path and format must be non-null");
    return guarded([&] {
        fdr::ExperimentConfig run_cfg = cfg->cfg;
        if (opts != nullptr)
        {
            run_cfg.deterministic_timing = opts->deterministic_timing != 0;
            run_cfg.n_workers = static_cast<arma::uword>(opts->n_workers);
            if (opts->sweep_axis != nullptr && std::strcmp(opts->sweep_axis, "none") != 0 &&
                opts->sweep_axis[0] != '\0')
            {
                if (opts->sweep_values == nullptr)
                    throw fdr::config_error("sweep axis given without sweep values");
                run_cfg.sweep_param = opts->sweep_axis;
                run_cfg.sweep_values.clear();
                std::string values(opts->sweep_values);
                std::size_t pos = 0;
                while (pos < values.size())
                {
                    std::size_t comma = values.find(',', pos);
                    if (comma == std::string::npos)
                        comma = values.size();
                    const std::string item = values.substr(pos, comma - pos);
                    try
                    {
                        run_cfg.sweep_values.push_back(std::stod(item));
                    }
                    catch (const std::exception &)
                    {
                        throw fdr::config_error("sweep: non-numeric value '" + item + "'");
                    }
                    pos = comma + 1;
                }
                if (run_cfg.sweep_values.empty())
                    throw fdr::config_error("sweep: value list is empty");
            }
        }

        const fdr::ExperimentResults results = fdr::run_experiment(run_cfg);
        const std::string fmt(format);
        if (fmt == "csv")
            fdr::emit_csv(results.records, out_path);
        else if (fmt == "json")
            fdr::emit_json(results.records, out_path);
        else
            throw fdr::config_error("format must be 'csv' or 'json'");

        if (summary_out != nullptr)
        {
            const std::string table = fdr::aggregates_table(results);
            char *buf = static_cast<char *>(std::malloc(table.size() + 1));
            if (buf == nullptr)
                throw std::bad_alloc();
            std::memcpy(buf, table.c_str(), table.size() + 1);
            *summary_out = buf;
        }
        return FDR_OK;
    });
}

void fdr_string_free(char *s)
{
    std::free(s);
}

fdr_status fdr_validate(int verbose, int *failures_out)
{
    if (failures_out == nullptr)
        return fail(FDR_EINVAL, "output pointer is null");
    return guarded([&] {
        *failures_out = fdr::validate(verbose != 0);
        return FDR_OK;
    });
}

fdr_status fdr_scalar_optimal_gain(const fdr_scalar_node *node, fdr_scalar_solution *out)
{
    if (node == nullptr || out == nullptr)
        return fail(FDR_EINVAL, "node and output pointer must be non-null");
    return guarded([&] {
        const fdr::ScalarSolution sol = fdr::optimal_gain(to_node(*node));
        out->gain = sol.a_tilde;
        out->senr = sol.senr;
        out->saturated = sol.saturated ? 1 : 0;
        return FDR_OK;
    });
}

fdr_status fdr_scalar_select_relay(const fdr_scalar_node *nodes, size_t n_nodes, size_t *index_out,
                                   fdr_scalar_solution *out)
{
    if (nodes == nullptr || n_nodes == 0 || index_out == nullptr || out == nullptr)
        return fail(FDR_EINVAL, "node array and output pointers must be non-null");
    return guarded([&] {
        std::vector<fdr::ScalarNode> converted;
        converted.reserve(n_nodes);
        for (size_t i = 0; i < n_nodes; ++i)
            converted.push_back(to_node(nodes[i]));
        const auto [idx, sol] = fdr::select_relay(converted);
        *index_out = idx;
        out->gain = sol.a_tilde;
        out->senr = sol.senr;
        out->saturated = sol.saturated ? 1 : 0;
        return FDR_OK;
    });
}

} // extern "C"
