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
//
// Command-line front end; talks to the library exclusively through the
// public C interface.

#include <fdrelay.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace
{

// Exit codes: 0 success, 1 invariant failure, 2 config error, 3 numerical
// instability beyond the retry budget.
int status_to_exit_code(fdr_status s)
{
    switch (s)
    {
    case FDR_OK:
        return 0;
    case FDR_EUNSTABLE:
        return 3;
    case FDR_EINVAL:
    case FDR_EIO:
    case FDR_EINTERNAL:
        return 2;
    }
    return 2;
}

int report_failure(fdr_status s)
{
    std::fprintf(stderr, "error: %s\n", fdr_last_error());
    return status_to_exit_code(s);
}

struct ConfigHandle
{
    fdr_config *ptr = nullptr;
    ~ConfigHandle() { fdr_config_destroy(ptr); }
};

int load_config(const std::string &path, ConfigHandle &cfg)
{
    const fdr_status s = path.empty() ? fdr_config_create(&cfg.ptr) : fdr_config_load(path.c_str(), &cfg.ptr);
    return (s == FDR_OK) ? 0 : report_failure(s);
}

int apply_overrides(ConfigHandle &cfg, const std::vector<std::string> &sets)
{
    for (const auto &kv : sets)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        const fdr_status s = fdr_config_set(cfg.ptr, key.c_str(), value.c_str());
        if (s != FDR_OK)
            return report_failure(s);
    }
    return 0;
}

int run_and_emit(ConfigHandle &cfg, const std::string &out, const std::string &format,
                 const std::string &axis, const std::string &values, uint64_t workers, bool no_timing,
                 bool quiet)
{
    fdr_run_options opts{};
    opts.sweep_axis = axis.empty() ? nullptr : axis.c_str();
    opts.sweep_values = values.empty() ? nullptr : values.c_str();
    opts.n_workers = workers;
    opts.deterministic_timing = no_timing ? 1 : 0;

    char *summary = nullptr;
    const fdr_status s = fdr_experiment_run(cfg.ptr, out.c_str(), format.c_str(), &opts, &summary);
    if (s != FDR_OK)
        return report_failure(s);
    if (!quiet && summary != nullptr)
        std::fputs(summary, stdout);
    fdr_string_free(summary);
    if (!quiet)
        std::printf("records written to %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{std::string("fdrelay ") + fdr_version() +
                 " - full-duplex AF MIMO relay transceiver designs"};
    app.require_subcommand(1);

    // validate
    auto *validate_cmd = app.add_subcommand("validate", "run the invariant suite (exit 0/1)");
    bool validate_quiet = false;
    validate_cmd->add_flag("-q,--quiet", validate_quiet, "only report failures");

    // run
    auto *run_cmd = app.add_subcommand("run", "run a Monte Carlo experiment");
    std::string run_config, run_out, run_format = "csv";
    std::vector<std::string> run_sets;
    uint64_t run_workers = 0;
    bool run_no_timing = false;
    bool run_quiet = false;
    run_cmd->add_option("--config", run_config, "config file (flat key = value)");
    run_cmd->add_option("--out", run_out, "output file")->required();
    run_cmd->add_option("--format", run_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--set", run_sets, "override a config key (key=value, repeatable)");
    run_cmd->add_option("--workers", run_workers, "worker threads (0 = hardware)");
    run_cmd->add_flag("--no-timing", run_no_timing, "zero the wall_ms column (byte-stable output)");
    run_cmd->add_flag("-q,--quiet", run_quiet, "suppress the aggregate table");

    // sweep
    auto *sweep_cmd = app.add_subcommand("sweep", "run an experiment over a parameter axis");
    std::string sweep_config, sweep_out, sweep_format = "csv", sweep_axis;
    std::vector<std::string> sweep_sets;
    std::vector<double> sweep_values;
    uint64_t sweep_workers = 0;
    bool sweep_no_timing = false;
    bool sweep_quiet = false;
    sweep_cmd->add_option("--config", sweep_config, "config file (flat key = value)");
    sweep_cmd->add_option("--axis", sweep_axis,
                          "kappa_db|sigma2_db|pmax_w|m|d_sr|rho_rr_db|kappa_split_db|mt_split")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "axis values")->required()->expected(-1);
    sweep_cmd->add_option("--out", sweep_out, "output file")->required();
    sweep_cmd->add_option("--format", sweep_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("--set", sweep_sets, "override a config key (key=value, repeatable)");
    sweep_cmd->add_option("--workers", sweep_workers, "worker threads (0 = hardware)");
    sweep_cmd->add_flag("--no-timing", sweep_no_timing, "zero the wall_ms column");
    sweep_cmd->add_flag("-q,--quiet", sweep_quiet, "suppress the aggregate table");

    CLI11_PARSE(app, argc, argv);

    if (validate_cmd->parsed())
    {
        int failures = 0;
        const fdr_status s = fdr_validate(validate_quiet ? 0 : 1, &failures);
        if (s != FDR_OK)
            return report_failure(s);
        if (failures > 0)
        {
            std::fprintf(stderr, "validate: %d check(s) failed\n", failures);
            return 1;
        }
        std::printf("validate: all checks passed\n");
        return 0;
    }

    if (run_cmd->parsed())
    {
        ConfigHandle cfg;
        if (int rc = load_config(run_config, cfg); rc != 0)
            return rc;
        if (int rc = apply_overrides(cfg, run_sets); rc != 0)
            return rc;
        return run_and_emit(cfg, run_out, run_format, "", "", run_workers, run_no_timing, run_quiet);
    }

    if (sweep_cmd->parsed())
    {
        ConfigHandle cfg;
        if (int rc = load_config(sweep_config, cfg); rc != 0)
            return rc;
        if (int rc = apply_overrides(cfg, sweep_sets); rc != 0)
            return rc;
        std::string values;
        for (std::size_t i = 0; i < sweep_values.size(); ++i)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", sweep_values[i]);
            if (i > 0)
                values += ',';
            values += buf;
        }
        return run_and_emit(cfg, sweep_out, sweep_format, sweep_axis, values, sweep_workers,
                            sweep_no_timing, sweep_quiet);
    }

    return 0;
}
