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

#ifndef fdrelay_harness_H
#define fdrelay_harness_H

#include "df.hpp"
#include "gp.hpp"
#include "mustr1.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fdr
{

// Monte Carlo experiment runner. A (seed, realization) pair fully determines
// the channel draw; methods evaluated on the same realization share it, so
// per-realization comparisons are paired.

enum class Method
{
    Gp,
    MuStR1,
    AltMuStR1,
    Df,
    HdAf,
    MrcMrt
};

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string &name);

class config_error : public std::invalid_argument
{
  public:
    explicit config_error(const std::string &what) : std::invalid_argument(what) {}
};

struct AlgoKnobs
{
    GpConfig gp;
    arma::uword mustr1_order = default_poly_order;
    arma::uword alt_max_iters = 50;
    double alt_tol = 1e-6;
    arma::uword df_c2 = 20;
    arma::uword df_cdf = 10;
    double df_c1 = 1e-4;
};

struct ExperimentConfig
{
    std::uint64_t seed = 1;
    arma::uword n_realizations = 50;
    SystemParams params;
    FadingConfig fading;
    std::vector<Method> methods{Method::Gp, Method::MuStR1, Method::AltMuStR1,
                                Method::Df, Method::HdAf, Method::MrcMrt};
    std::string sweep_param = "none";
    std::vector<double> sweep_values{0.0};
    AlgoKnobs knobs;
    arma::uword n_workers = 1; // 0 selects the hardware thread count
    bool deterministic_timing = false;

    // dB-scale bookkeeping for the emitted records.
    double kappa_db = -40.0;
    double beta_db = -40.0;
    double sigma2_db = -40.0;
};

// Default setup: P_max 1 W, sigma_n^2 -40 dBW, kappa = beta = -40 dB, M = 4,
// rho_rr 0 dB, rho_sr = rho_rd = -30 dB, rho_sd = -60 dB, K_R = 10.
ExperimentConfig default_config();

// Flat key = value file; '#' starts a comment. Unknown keys are rejected.
ExperimentConfig load_config(const std::string &path);
ExperimentConfig parse_config_text(const std::string &text);

// Applies one key/value pair (the config-file vocabulary) to a config.
void apply_config_kv(ExperimentConfig &cfg, const std::string &key, const std::string &value);

struct ResultRecord
{
    std::uint64_t seed = 0;
    arma::uword realization = 0;
    std::string method;
    std::string sweep_param = "none";
    double sweep_value = 0.0;
    double kappa_db = 0.0;
    double beta_db = 0.0;
    double sigma2_db = 0.0;
    double pmax_w = 0.0;
    arma::uword mt = 0;
    arma::uword mr = 0;
    arma::uword md = 0;
    double sdnr = 0.0;
    double rate_bps_hz = 0.0;
    double relay_power_w = 0.0;
    double ps_w = 0.0;
    arma::uword iterations = 0;
    double wall_ms = 0.0;
};

struct Aggregate
{
    std::string method;
    std::string sweep_param;
    double sweep_value = 0.0;
    arma::uword n = 0;
    double mean_rate = 0.0;
    double stderr_rate = 0.0;
    double mean_wall_ms = 0.0;
};

struct ExperimentResults
{
    std::vector<ResultRecord> records;
    std::vector<Aggregate> aggregates;
};

// Applies one sweep axis value to a copy of the base setup. Supported axes:
// kappa_db (kappa = beta), sigma2_db, pmax_w, m (mt = mr = md), d_sr (relay
// position on a 20-unit source-destination line), rho_rr_db, kappa_split_db
// (kappa dB + beta dB fixed at the base sum), mt_split (mt + mr fixed, md=1).
struct SweptSetup
{
    SystemParams params;
    FadingConfig fading;
    double kappa_db = 0.0;
    double beta_db = 0.0;
    double sigma2_db = 0.0;
};

SweptSetup apply_sweep(const ExperimentConfig &cfg, const std::string &axis, double value);

ChannelSet channel_for(const ExperimentConfig &cfg, const SweptSetup &setup, arma::uword realization);

// Runs one (sweep value, realization, method) cell.
ResultRecord run_single(const ExperimentConfig &cfg, const SweptSetup &setup, arma::uword sweep_index,
                        arma::uword realization, Method m);

ExperimentResults run_experiment(const ExperimentConfig &cfg);

void emit_csv(const std::vector<ResultRecord> &records, const std::string &path);
void emit_json(const std::vector<ResultRecord> &records, const std::string &path);
std::string csv_string(const std::vector<ResultRecord> &records);
std::string json_string(const std::vector<ResultRecord> &records);

std::string aggregates_table(const ExperimentResults &results);

// Fast end-to-end invariant battery; returns the number of failed checks and
// prints one line per check when verbose.
int validate(bool verbose);

} // namespace fdr

#endif
