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

#include "harness.hpp"

#include "scalar_relay.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fdr
{

namespace
{

constexpr std::uint64_t tag_channel = 1;
constexpr std::uint64_t tag_gp = 2;
constexpr std::uint64_t tag_hd = 3;

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string &s, const std::string &key)
{
    try
    {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception &)
    {
        throw config_error("config: key '" + key + "' has a non-numeric value '" + s + "'");
    }
}

arma::uword to_count(const std::string &s, const std::string &key)
{
    const double v = to_double(s, key);
    if (v < 0.0 || v != std::floor(v))
        throw config_error("config: key '" + key + "' must be a non-negative integer");
    return static_cast<arma::uword>(v);
}

std::string trim(const std::string &s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s)
{
    for (auto &c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

std::string method_name(Method m)
{
    switch (m)
    {
    case Method::Gp:
        return "GP";
    case Method::MuStR1:
        return "MuStR1";
    case Method::AltMuStR1:
        return "AltMuStR1";
    case Method::Df:
        return "DF";
    case Method::HdAf:
        return "HD-AF";
    case Method::MrcMrt:
        return "MRC-MRT";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string &name)
{
    const std::string n = lower(trim(name));
    if (n == "gp")
        return Method::Gp;
    if (n == "mustr1")
        return Method::MuStR1;
    if (n == "altmustr1")
        return Method::AltMuStR1;
    if (n == "df")
        return Method::Df;
    if (n == "hd-af" || n == "hdaf" || n == "hd")
        return Method::HdAf;
    if (n == "mrc-mrt" || n == "mrcmrt")
        return Method::MrcMrt;
    return std::nullopt;
}

ExperimentConfig default_config()
{
    ExperimentConfig cfg;
    cfg.params.ps_max = 1.0;
    cfg.params.pr_max = 1.0;
    cfg.params.sigma2_nr = db2lin(-40.0);
    cfg.params.sigma2_nd = db2lin(-40.0);
    cfg.params.kappa = db2lin(-40.0);
    cfg.params.beta = db2lin(-40.0);
    cfg.params.mt = 4;
    cfg.params.mr = 4;
    cfg.params.md = 4;
    cfg.fading.rho_sr = db2lin(-30.0);
    cfg.fading.rho_rd = db2lin(-30.0);
    cfg.fading.rho_sd = db2lin(-60.0);
    cfg.fading.rho_rr = 1.0;
    cfg.fading.k_rician = 10.0;
    cfg.kappa_db = -40.0;
    cfg.beta_db = -40.0;
    cfg.sigma2_db = -40.0;
    return cfg;
}

void apply_config_kv(ExperimentConfig &cfg, const std::string &raw_key, const std::string &raw_value)
{
    const std::string key = lower(trim(raw_key));
    const std::string value = trim(raw_value);
    if (value.empty())
        throw config_error("config: key '" + key + "' has an empty value");

    {
        if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(to_count(value, key));
        else if (key == "n_realizations")
            cfg.n_realizations = to_count(value, key);
        else if (key == "pmax_w")
        {
            cfg.params.ps_max = to_double(value, key);
            cfg.params.pr_max = cfg.params.ps_max;
        }
        else if (key == "sigma2_dbw")
        {
            cfg.sigma2_db = to_double(value, key);
            cfg.params.sigma2_nr = db2lin(cfg.sigma2_db);
            cfg.params.sigma2_nd = db2lin(cfg.sigma2_db);
        }
        else if (key == "kappa_db")
        {
            cfg.kappa_db = to_double(value, key);
            cfg.params.kappa = db2lin(cfg.kappa_db);
        }
        else if (key == "beta_db")
        {
            cfg.beta_db = to_double(value, key);
            cfg.params.beta = db2lin(cfg.beta_db);
        }
        else if (key == "m")
        {
            const arma::uword m = to_count(value, key);
            cfg.params.mt = m;
            cfg.params.mr = m;
            cfg.params.md = m;
        }
        else if (key == "mt")
            cfg.params.mt = to_count(value, key);
        else if (key == "mr")
            cfg.params.mr = to_count(value, key);
        else if (key == "md")
            cfg.params.md = to_count(value, key);
        else if (key == "rho_rr_db")
            cfg.fading.rho_rr = db2lin(to_double(value, key));
        else if (key == "rho_sr_db")
        {
            // Table defaults tie the two hop losses together.
            cfg.fading.rho_sr = db2lin(to_double(value, key));
            cfg.fading.rho_rd = cfg.fading.rho_sr;
        }
        else if (key == "rho_rd_db")
            cfg.fading.rho_rd = db2lin(to_double(value, key));
        else if (key == "rho_sd_db")
            cfg.fading.rho_sd = db2lin(to_double(value, key));
        else if (key == "k_rician")
            cfg.fading.k_rician = to_double(value, key);
        else if (key == "gp_c1")
            cfg.knobs.gp.c1 = to_double(value, key);
        else if (key == "gp_inits")
            cfg.knobs.gp.inits = to_count(value, key);
        else if (key == "gp_max_iters")
            cfg.knobs.gp.max_iters = to_count(value, key);
        else if (key == "mustr1_k")
            cfg.knobs.mustr1_order = to_count(value, key);
        else if (key == "alt_max_iters")
            cfg.knobs.alt_max_iters = to_count(value, key);
        else if (key == "alt_tol")
            cfg.knobs.alt_tol = to_double(value, key);
        else if (key == "df_c2")
            cfg.knobs.df_c2 = to_count(value, key);
        else if (key == "df_cdf")
            cfg.knobs.df_cdf = to_count(value, key);
        else if (key == "df_c1")
            cfg.knobs.df_c1 = to_double(value, key);
        else if (key == "n_workers")
            cfg.n_workers = to_count(value, key);
        else if (key == "methods")
        {
            cfg.methods.clear();
            std::istringstream ms(value);
            std::string item;
            while (std::getline(ms, item, ','))
            {
                const auto m = method_from_name(item);
                if (!m)
                    throw config_error("config: unknown method '" + trim(item) + "'");
                cfg.methods.push_back(*m);
            }
            if (cfg.methods.empty())
                throw config_error("config: methods list is empty");
        }
        else
            throw config_error("config: unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string &text)
{
    ExperimentConfig cfg = default_config();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        apply_config_kv(cfg, line.substr(0, eq), line.substr(eq + 1));
    }

    if (cfg.n_realizations < 1)
        throw config_error("config: n_realizations must be >= 1");
    try
    {
        cfg.params.validate();
        cfg.fading.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

SweptSetup apply_sweep(const ExperimentConfig &cfg, const std::string &axis, double value)
{
    SweptSetup s{cfg.params, cfg.fading, cfg.kappa_db, cfg.beta_db, cfg.sigma2_db};
    if (axis == "none" || axis.empty())
        return s;

    if (axis == "kappa_db")
    {
        s.kappa_db = value;
        s.beta_db = value;
        s.params.kappa = db2lin(value);
        s.params.beta = db2lin(value);
    }
    else if (axis == "sigma2_db")
    {
        s.sigma2_db = value;
        s.params.sigma2_nr = db2lin(value);
        s.params.sigma2_nd = db2lin(value);
    }
    else if (axis == "pmax_w")
    {
        if (value <= 0.0)
            throw config_error("sweep: pmax_w values must be positive");
        s.params.ps_max = value;
        s.params.pr_max = value;
    }
    else if (axis == "m")
    {
        const auto m = static_cast<arma::uword>(std::llround(value));
        if (m < 1)
            throw config_error("sweep: m values must be >= 1");
        s.params.mt = m;
        s.params.mr = m;
        s.params.md = m;
    }
    else if (axis == "d_sr")
    {
        if (value <= 0.0 || value >= 20.0)
            throw config_error("sweep: d_sr must lie strictly inside (0, 20)");
        s.fading.rho_sr = pathloss_from_distance(value);
        s.fading.rho_rd = pathloss_from_distance(20.0 - value);
    }
    else if (axis == "rho_rr_db")
    {
        s.fading.rho_rr = db2lin(value);
    }
    else if (axis == "kappa_split_db")
    {
        // kappa dB + beta dB stays at the base sum.
        const double sum_db = cfg.kappa_db + cfg.beta_db;
        s.kappa_db = value;
        s.beta_db = sum_db - value;
        s.params.kappa = db2lin(s.kappa_db);
        s.params.beta = db2lin(s.beta_db);
    }
    else if (axis == "mt_split")
    {
        const arma::uword m_sum = cfg.params.mt + cfg.params.mr;
        const auto mt = static_cast<arma::uword>(std::llround(value));
        if (mt < 1 || mt >= m_sum)
            throw config_error("sweep: mt_split values must leave at least one receive antenna");
        s.params.mt = mt;
        s.params.mr = m_sum - mt;
        s.params.md = 1;
    }
    else
    {
        throw config_error("sweep: unknown axis '" + axis + "'");
    }
    return s;
}

ChannelSet channel_for(const ExperimentConfig &cfg, const SweptSetup &setup, arma::uword realization)
{
    RngStream rng = RngStream::substream(cfg.seed, realization, tag_channel);
    return draw_channels(rng, setup.params, setup.fading);
}

namespace
{

struct MethodOutcome
{
    double sdnr = 0.0;
    double rate = 0.0;
    double relay_power = 0.0;
    double ps = 0.0;
    arma::uword iterations = 0;
};

MethodOutcome dispatch_method(const ExperimentConfig &cfg, const SweptSetup &setup, const ChannelSet &ch,
                              arma::uword sweep_index, arma::uword realization, Method m,
                              arma::uword attempt)
{
    const std::uint64_t stream_index = (static_cast<std::uint64_t>(sweep_index) << 32) |
                                       static_cast<std::uint64_t>(realization);
    MethodOutcome out;
    switch (m)
    {
    case Method::Gp:
    {
        RngStream rng = RngStream::substream(cfg.seed, stream_index, tag_gp + 16 * attempt);
        const GpResult r = gp_optimize(setup.params, ch, cfg.knobs.gp, rng);
        out = {r.report.sdnr, r.report.rate, r.report.relay_power, r.design.ps, r.total_iterations};
        break;
    }
    case Method::MuStR1:
    {
        const Rank1Result r = mustr1(setup.params, ch, cfg.knobs.mustr1_order);
        out = {r.report.sdnr, r.report.rate, r.report.relay_power, setup.params.ps_max, r.iterations};
        break;
    }
    case Method::AltMuStR1:
    {
        const Rank1Result r =
            alt_mustr1(setup.params, ch, cfg.knobs.mustr1_order, cfg.knobs.alt_max_iters, cfg.knobs.alt_tol);
        out = {r.report.sdnr, r.report.rate, r.report.relay_power, setup.params.ps_max, r.iterations};
        break;
    }
    case Method::Df:
    {
        const DfResult r = df_optimize(setup.params, ch, cfg.knobs.df_cdf, cfg.knobs.df_c2, cfg.knobs.df_c1);
        const double relay_power =
            (1.0 + setup.params.kappa) * std::real(arma::trace(r.design.q));
        out = {r.zeta, r.rate, relay_power, r.design.ps, r.iterations};
        break;
    }
    case Method::HdAf:
    {
        // Same AF design problem with the loopback channel removed and the
        // half-duplex 1/2 rate prefactor. The recorded sdnr is the effective
        // end-to-end value matching the halved rate.
        ChannelSet hd = ch;
        hd.h_rr.zeros();
        RngStream rng = RngStream::substream(cfg.seed, stream_index, tag_hd + 16 * attempt);
        const GpResult r = gp_optimize(setup.params, hd, cfg.knobs.gp, rng);
        const double rate = 0.5 * r.report.rate;
        out = {std::exp2(rate) - 1.0, rate, r.report.relay_power, r.design.ps, r.total_iterations};
        break;
    }
    case Method::MrcMrt:
    {
        const Rank1Result r = mrc_mrt_design(setup.params, ch, cfg.knobs.mustr1_order);
        out = {r.report.sdnr, r.report.rate, r.report.relay_power, setup.params.ps_max, r.iterations};
        break;
    }
    }
    return out;
}

} // namespace

ResultRecord run_single(const ExperimentConfig &cfg, const SweptSetup &setup, arma::uword sweep_index,
                        arma::uword realization, Method m)
{
    const ChannelSet ch = channel_for(cfg, setup, realization);

    ResultRecord rec;
    rec.seed = cfg.seed;
    rec.realization = realization;
    rec.method = method_name(m);
    rec.sweep_param = cfg.sweep_param;
    rec.sweep_value = cfg.sweep_values.at(sweep_index);
    rec.kappa_db = setup.kappa_db;
    rec.beta_db = setup.beta_db;
    rec.sigma2_db = setup.sigma2_db;
    rec.pmax_w = setup.params.pr_max;
    rec.mt = setup.params.mt;
    rec.mr = setup.params.mr;
    rec.md = setup.params.md;

    const auto t0 = std::chrono::steady_clock::now();
    MethodOutcome out;
    const arma::uword retry_budget = 3;
    for (arma::uword attempt = 0;; ++attempt)
    {
        try
        {
            out = dispatch_method(cfg, setup, ch, sweep_index, realization, m, attempt);
            break;
        }
        catch (const instability_error &)
        {
            if (attempt + 1 >= retry_budget)
                throw;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();

    rec.sdnr = out.sdnr;
    rec.rate_bps_hz = out.rate;
    rec.relay_power_w = out.relay_power;
    rec.ps_w = out.ps;
    rec.iterations = out.iterations;
    rec.wall_ms = cfg.deterministic_timing
                      ? 0.0
                      : std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rec;
}

ExperimentResults run_experiment(const ExperimentConfig &cfg)
{
    if (cfg.n_realizations < 1)
        throw config_error("run_experiment: n_realizations must be >= 1");
    if (cfg.methods.empty())
        throw config_error("run_experiment: no methods selected");
    if (cfg.sweep_values.empty())
        throw config_error("run_experiment: sweep value list is empty");
    for (const double v : cfg.sweep_values)
        if (!std::isfinite(v))
            throw config_error("run_experiment: sweep values must be finite");

    struct Cell
    {
        arma::uword sweep_index;
        arma::uword realization;
        Method method;
    };
    std::vector<Cell> cells;
    std::vector<SweptSetup> setups;
    setups.reserve(cfg.sweep_values.size());
    for (arma::uword s = 0; s < cfg.sweep_values.size(); ++s)
    {
        setups.push_back(apply_sweep(cfg, cfg.sweep_param, cfg.sweep_values[s]));
        for (arma::uword r = 0; r < cfg.n_realizations; ++r)
            for (const Method m : cfg.methods)
                cells.push_back({s, r, m});
    }

    std::vector<ResultRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    arma::uword workers = cfg.n_workers;
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<arma::uword>(workers, cells.size());

    auto worker_fn = [&]() {
        while (true)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size())
                return;
            try
            {
                const Cell &c = cells[i];
                records[i] = run_single(cfg, setups[c.sweep_index], c.sweep_index, c.realization, c.method);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                next.store(cells.size());
                return;
            }
        }
    };

    if (workers <= 1)
    {
        worker_fn();
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (arma::uword w = 0; w < workers; ++w)
            pool.emplace_back(worker_fn);
        for (auto &t : pool)
            t.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    // Task order is canonical (sweep, realization, method); the record vector
    // is already deterministic regardless of scheduling.
    ExperimentResults results;
    results.records = std::move(records);

    for (arma::uword s = 0; s < cfg.sweep_values.size(); ++s)
    {
        for (const Method m : cfg.methods)
        {
            Aggregate agg;
            agg.method = method_name(m);
            agg.sweep_param = cfg.sweep_param;
            agg.sweep_value = cfg.sweep_values[s];
            double sum = 0.0;
            double sum2 = 0.0;
            double wall = 0.0;
            for (const auto &rec : results.records)
            {
                if (rec.method != agg.method || rec.sweep_value != agg.sweep_value)
                    continue;
                sum += rec.rate_bps_hz;
                sum2 += rec.rate_bps_hz * rec.rate_bps_hz;
                wall += rec.wall_ms;
                ++agg.n;
            }
            if (agg.n > 0)
            {
                agg.mean_rate = sum / agg.n;
                agg.mean_wall_ms = wall / agg.n;
                if (agg.n > 1)
                {
                    const double var = std::max(0.0, (sum2 - sum * sum / agg.n) / (agg.n - 1));
                    agg.stderr_rate = std::sqrt(var / agg.n);
                }
            }
            results.aggregates.push_back(agg);
        }
    }
    return results;
}

namespace
{

const char *csv_header = "seed,realization,method,sweep_param,sweep_value,kappa_db,beta_db,sigma2_db,"
                         "pmax_w,mt,mr,md,sdnr,rate_bps_hz,relay_power_w,ps_w,iterations,wall_ms";

} // namespace

std::string csv_string(const std::vector<ResultRecord> &records)
{
    std::string out = csv_header;
    out += '\n';
    for (const auto &r : records)
    {
        out += std::to_string(r.seed) + ',' + std::to_string(r.realization) + ',' + r.method + ',' +
               r.sweep_param + ',' + fmt_double(r.sweep_value) + ',' + fmt_double(r.kappa_db) + ',' +
               fmt_double(r.beta_db) + ',' + fmt_double(r.sigma2_db) + ',' + fmt_double(r.pmax_w) + ',' +
               std::to_string(r.mt) + ',' + std::to_string(r.mr) + ',' + std::to_string(r.md) + ',' +
               fmt_double(r.sdnr) + ',' + fmt_double(r.rate_bps_hz) + ',' + fmt_double(r.relay_power_w) +
               ',' + fmt_double(r.ps_w) + ',' + std::to_string(r.iterations) + ',' + fmt_double(r.wall_ms) +
               '\n';
    }
    return out;
}

std::string json_string(const std::vector<ResultRecord> &records)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &r : records)
    {
        arr.push_back({{"seed", r.seed},
                       {"realization", r.realization},
                       {"method", r.method},
                       {"sweep_param", r.sweep_param},
                       {"sweep_value", r.sweep_value},
                       {"kappa_db", r.kappa_db},
                       {"beta_db", r.beta_db},
                       {"sigma2_db", r.sigma2_db},
                       {"pmax_w", r.pmax_w},
                       {"mt", r.mt},
                       {"mr", r.mr},
                       {"md", r.md},
                       {"sdnr", r.sdnr},
                       {"rate_bps_hz", r.rate_bps_hz},
                       {"relay_power_w", r.relay_power_w},
                       {"ps_w", r.ps_w},
                       {"iterations", r.iterations},
                       {"wall_ms", r.wall_ms}});
    }
    return arr.dump(2) + "\n";
}

namespace
{

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("emit: cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw io_error("emit: write to '" + path + "' failed");
}

} // namespace

void emit_csv(const std::vector<ResultRecord> &records, const std::string &path)
{
    write_file(path, csv_string(records));
}

void emit_json(const std::vector<ResultRecord> &records, const std::string &path)
{
    write_file(path, json_string(records));
}

std::string aggregates_table(const ExperimentResults &results)
{
    std::ostringstream out;
    out << "method      sweep_param      sweep_value   n     mean_rate   stderr_rate  mean_wall_ms\n";
    for (const auto &a : results.aggregates)
    {
        char line[160];
        std::snprintf(line, sizeof(line), "%-11s %-16s %11.4g %5llu %11.5g %12.3g %13.4g\n",
                      a.method.c_str(), a.sweep_param.c_str(), a.sweep_value,
                      static_cast<unsigned long long>(a.n), a.mean_rate, a.stderr_rate, a.mean_wall_ms);
        out << line;
    }
    return out.str();
}

// --- validate -------------------------------------------------------------

namespace
{

struct CheckContext
{
    int failures = 0;
    bool verbose = true;

    void check(bool ok, const std::string &name)
    {
        if (!ok)
            ++failures;
        if (verbose || !ok)
            std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    }
};

arma::cx_mat random_stable_w(const SystemParams &params, const ChannelSet &ch, RngStream &rng, double target)
{
    const LoopKernels k = build_kernels(params, ch, params.ps_max);
    arma::cx_mat w = rng.cgaussian_matrix(params.mt, params.mr);
    const double radius = loop_spectral_radius(w, k);
    if (radius > 0.0)
        w *= std::sqrt(target / radius); // radius scales with |W|^2
    // keep the relay power in a sane range as well
    const arma::cx_mat q = relay_q(w, k);
    const double power = (1.0 + params.kappa) * std::real(arma::trace(q));
    if (power > params.pr_max)
        w *= std::sqrt(std::sqrt(params.pr_max / power));
    return w;
}

} // namespace

int validate(bool verbose)
{
    CheckContext ctx;
    ctx.verbose = verbose;
    RngStream rng(20260810);

    // Selection-matrix identities, exact.
    {
        bool t_ok = true, d_ok = true, k_ok = true;
        for (arma::uword m = 1; m <= 4; ++m)
        {
            const arma::cx_mat st = selection_T(m).cx();
            const arma::cx_mat sd = selection_D(m).cx();
            const arma::cx_mat sk = selection_K(m).cx();
            for (int i = 0; i < 20; ++i)
            {
                const arma::cx_mat a = rng.cgaussian_matrix(m, m);
                const arma::cx_mat b = rng.cgaussian_matrix(m, m);
                t_ok = t_ok && arma::approx_equal(st * vectorize(a), vectorize(a.st()), "absdiff", 0.0);
                d_ok = d_ok && arma::approx_equal(sd * vectorize(a),
                                                  vectorize(arma::cx_mat(arma::diagmat(a.diag()))),
                                                  "absdiff", 0.0);
                const arma::cx_mat outer = vectorize(a) * vectorize(b).st();
                k_ok = k_ok && arma::approx_equal(sk * vectorize(outer),
                                                  vectorize(arma::cx_mat(arma::kron(a, b))), "absdiff", 0.0);
            }
        }
        ctx.check(t_ok, "selection S_T identity (M=1..4, exact)");
        ctx.check(d_ok, "selection S_D identity (M=1..4, exact)");
        ctx.check(k_ok, "selection S_K identity (M=1..4, exact)");
    }

    // PSD projection: analytic case plus minimal water level.
    {
        arma::cx_mat q(2, 2, arma::fill::zeros);
        q(0, 0) = 3.0;
        q(1, 1) = 1.0;
        const PsdProjection p = psd_project_power(q, 2.0);
        const bool exact = std::abs(p.zeta - 1.0) < 1e-12 && std::abs(std::real(p.matrix(0, 0)) - 2.0) < 1e-12 &&
                           std::abs(std::real(p.matrix(1, 1))) < 1e-12;
        ctx.check(exact, "psd projection water level (diag(3,1) cap 2 -> diag(2,0))");
    }

    // Loop fixed point: direct inverse vs Picard iteration.
    {
        ExperimentConfig cfg = default_config();
        cfg.params.mt = cfg.params.mr = cfg.params.md = 3;
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial)
        {
            RngStream ch_rng = RngStream::substream(7, trial, tag_channel);
            const ChannelSet ch = draw_channels(ch_rng, cfg.params, cfg.fading);
            const arma::cx_mat w = random_stable_w(cfg.params, ch, rng, 0.5);
            const LoopKernels k = build_kernels(cfg.params, ch, cfg.params.ps_max);
            const arma::cx_mat q = relay_q(w, k);
            const arma::cx_mat res = w * r_op(q, cfg.params, ch, cfg.params.ps_max) * w.t() - q;
            ok = ok && arma::norm(res, "fro") <= 1e-9 * arma::norm(q, "fro");
            const arma::cx_mat qp = relay_q_picard(w, cfg.params, ch, cfg.params.ps_max);
            ok = ok && arma::norm(qp - q, "fro") <= 1e-10 * arma::norm(q, "fro");
        }
        ctx.check(ok, "covariance fixed point (residual < 1e-9, Picard < 1e-10)");
    }

    // MMSE receive filter dominance.
    {
        ExperimentConfig cfg = default_config();
        cfg.params.mt = cfg.params.mr = cfg.params.md = 3;
        RngStream ch_rng = RngStream::substream(11, 0, tag_channel);
        const ChannelSet ch = draw_channels(ch_rng, cfg.params, cfg.fading);
        const arma::cx_mat w = random_stable_w(cfg.params, ch, rng, 0.4);
        const LoopKernels k = build_kernels(cfg.params, ch, cfg.params.ps_max);
        const arma::cx_mat q = relay_q(w, k);
        const arma::cx_vec z_star = mmse_z(w, cfg.params.ps_max, q, cfg.params, ch);
        const double best = performance_with_q({w, z_star, cfg.params.ps_max}, q, cfg.params, ch).sdnr;
        bool ok = true;
        for (int i = 0; i < 50; ++i)
        {
            const arma::cx_vec z = rng.cgaussian_matrix(cfg.params.md, 1);
            const double s = performance_with_q({w, z, cfg.params.ps_max}, q, cfg.params, ch).sdnr;
            ok = ok && (best - s >= -1e-10 * best);
        }
        ctx.check(ok, "MMSE filter dominates 50 random receive filters");
    }

    // Scalar cross-oracle: 1x1x1 MIMO pipeline vs scalar SENR closed form.
    {
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial)
        {
            SystemParams p;
            p.mt = p.mr = p.md = 1;
            p.kappa = 0.01;
            p.beta = 0.003;
            p.sigma2_nr = 1e-3;
            p.sigma2_nd = 2e-3;
            ChannelSet ch;
            ch.h_sr = arma::cx_vec{rng.cgaussian()};
            ch.h_rd = arma::cx_mat(1, 1);
            ch.h_rd(0, 0) = rng.cgaussian();
            ch.h_sd = arma::cx_vec{cxd(0.0, 0.0)};
            ch.h_rr = arma::cx_mat(1, 1);
            ch.h_rr(0, 0) = 0.5 * rng.cgaussian();

            ScalarNode node;
            node.h_sr = ch.h_sr(0);
            node.h_rr_est = ch.h_rr(0, 0);
            node.zeta_err = 0.0;
            node.h_rd = {ch.h_rd(0, 0)};
            node.w_n = {p.sigma2_nd};
            node.relay_noise = p.sigma2_nr;
            node.gamma = p.kappa;
            node.beta = p.beta;
            node.p_relay = p.pr_max;
            node.ps = p.ps_max;

            const double a_tilde = 0.5 * a_max(node);
            RelayDesign d;
            d.w = arma::cx_mat(1, 1);
            d.w(0, 0) = std::sqrt(a_tilde);
            d.ps = p.ps_max;
            d.z = arma::cx_vec{cxd(1.0, 0.0)};
            const PerformanceReport rep = performance(d, p, ch);
            const double reference = senr(node, a_tilde);
            ok = ok && std::abs(rep.sdnr - reference) <= 1e-10 * reference;
        }
        ctx.check(ok, "scalar SENR cross-oracle (Mt=Mr=Md=1, rel err < 1e-10)");
    }

    // Relay power affine in P_s.
    {
        ExperimentConfig cfg = default_config();
        cfg.params.mt = cfg.params.mr = cfg.params.md = 2;
        RngStream ch_rng = RngStream::substream(13, 0, tag_channel);
        const ChannelSet ch = draw_channels(ch_rng, cfg.params, cfg.fading);
        const arma::cx_mat w = random_stable_w(cfg.params, ch, rng, 0.5);
        auto power_at = [&](double ps) {
            const LoopKernels k = build_kernels(cfg.params, ch, ps);
            return std::real(arma::trace(tx_covariance(relay_q(w, k), cfg.params.kappa)));
        };
        const double p0 = power_at(0.0);
        const double p1 = power_at(1.0);
        bool ok = true;
        for (const double ps : {0.25, 0.5, 0.75})
        {
            const double expected = p0 + (p1 - p0) * ps;
            ok = ok && std::abs(power_at(ps) - expected) <= 1e-9 * std::max(expected, 1e-30);
        }
        ctx.check(ok, "relay power affine in P_s (5-point line fit)");
    }

    // Determinism across runs and worker counts.
    {
        ExperimentConfig cfg = default_config();
        cfg.n_realizations = 2;
        cfg.methods = {Method::MuStR1, Method::MrcMrt};
        cfg.deterministic_timing = true;
        cfg.n_workers = 1;
        const std::string a = csv_string(run_experiment(cfg).records);
        const std::string b = csv_string(run_experiment(cfg).records);
        cfg.n_workers = 4;
        const std::string c = csv_string(run_experiment(cfg).records);
        ctx.check(a == b && a == c, "deterministic CSV across runs and worker counts");
    }

    return ctx.failures;
}

} // namespace fdr
