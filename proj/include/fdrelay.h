/* SPDX-License-Identifier: Apache-2.0
 *
 * fdrelay - transceiver design toolkit for full-duplex AF MIMO relays
 * Copyright (C) 2026 fdrelay developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the fdrelay shared library. All functions return an
 * fdr_status; on failure fdr_last_error() carries a thread-local message.
 * Handles are opaque and owned by the library; destroy functions accept
 * NULL.
 */

#ifndef FDRELAY_H
#define FDRELAY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C"
{
#endif

typedef enum fdr_status
{
    FDR_OK = 0,
    FDR_EINVAL = 1,    /* invalid argument or configuration */
    FDR_EUNSTABLE = 2, /* relay distortion loop diverged beyond the retry budget */
    FDR_EIO = 3,       /* file I/O failure */
    FDR_EINTERNAL = 4  /* unexpected internal failure */
} fdr_status;

const char *fdr_version(void);

/* Message describing the most recent failure on this thread. */
const char *fdr_last_error(void);

/* --------------------------------------------------------------------- */
/* Experiment configuration                                               */
/* --------------------------------------------------------------------- */

typedef struct fdr_config fdr_config;

/* Default setup: P_max 1 W, sigma_n^2 -40 dBW, kappa = beta = -40 dB,
 * M = 4, rho_rr 0 dB, rho_sr = rho_rd -30 dB, rho_sd -60 dB, K_R = 10. */
fdr_status fdr_config_create(fdr_config **out);

/* Flat "key = value" file; '#' starts a comment. Keys: seed,
 * n_realizations, pmax_w, sigma2_dbw, kappa_db, beta_db, m, mt, mr, md,
 * rho_rr_db, rho_sr_db, rho_rd_db, rho_sd_db, k_rician, gp_c1, gp_inits,
 * gp_max_iters, mustr1_k, alt_max_iters, alt_tol, df_c2, df_cdf, df_c1,
 * n_workers, methods. */
fdr_status fdr_config_load(const char *path, fdr_config **out);

/* Applies one key/value pair using the config-file vocabulary. */
fdr_status fdr_config_set(fdr_config *cfg, const char *key, const char *value);

void fdr_config_destroy(fdr_config *cfg);

/* --------------------------------------------------------------------- */
/* Single-realization designs                                             */
/* --------------------------------------------------------------------- */

typedef enum fdr_method
{
    FDR_METHOD_GP = 0,
    FDR_METHOD_MUSTR1 = 1,
    FDR_METHOD_ALTMUSTR1 = 2,
    FDR_METHOD_DF = 3,
    FDR_METHOD_HD_AF = 4,
    FDR_METHOD_MRC_MRT = 5
} fdr_method;

typedef struct fdr_design_metrics
{
    double sdnr;
    double rate_bps_hz;
    double relay_power_w;
    double ps_w;
    uint64_t iterations;
} fdr_design_metrics;

/* Designs the relay for the channel realization identified by
 * (config seed, realization) and reports the resulting link metrics. */
fdr_status fdr_design_run(const fdr_config *cfg, uint64_t realization, fdr_method method,
                          fdr_design_metrics *out);

/* --------------------------------------------------------------------- */
/* Monte Carlo experiments                                                */
/* --------------------------------------------------------------------- */

typedef struct fdr_run_options
{
    const char *sweep_axis;   /* NULL or "none" disables the sweep; axes:
                               * kappa_db, sigma2_db, pmax_w, m, d_sr,
                               * rho_rr_db, kappa_split_db, mt_split */
    const char *sweep_values; /* comma-separated numbers, NULL when unused */
    uint64_t n_workers;       /* 0 selects the hardware thread count */
    int deterministic_timing; /* nonzero zeroes wall_ms for byte-stable output */
} fdr_run_options;

/* Runs the experiment and writes the records to out_path in "csv" or
 * "json" format. On success *summary_out (optional) receives the
 * aggregate table; release it with fdr_string_free. */
fdr_status fdr_experiment_run(const fdr_config *cfg, const char *out_path, const char *format,
                              const fdr_run_options *opts, char **summary_out);

void fdr_string_free(char *s);

/* --------------------------------------------------------------------- */
/* Invariant suite                                                        */
/* --------------------------------------------------------------------- */

/* Runs the built-in invariant battery; *failures_out receives the number
 * of failed checks (0 means all passed). Prints one line per check to
 * stdout when verbose is nonzero. */
fdr_status fdr_validate(int verbose, int *failures_out);

/* --------------------------------------------------------------------- */
/* Scalar robust relay selection                                          */
/* --------------------------------------------------------------------- */

typedef struct fdr_scalar_node
{
    double h_sr_re, h_sr_im;         /* source-relay channel */
    double h_rr_est_re, h_rr_est_im; /* self-interference estimate */
    double err_radius;               /* estimation-error disk radius */
    const double *h_rd_re;           /* per-destination channels */
    const double *h_rd_im;
    const double *noise_w; /* per-destination noise powers */
    size_t n_dest;
    double relay_noise_w;
    double beta;  /* receive-chain distortion ratio */
    double gamma; /* transmit-chain distortion ratio */
    double p_relay_w;
    double ps_w;
} fdr_scalar_node;

typedef struct fdr_scalar_solution
{
    double gain; /* optimal squared amplification |a|^2 */
    double senr; /* worst-case SENR at the optimum */
    int saturated;
} fdr_scalar_solution;

fdr_status fdr_scalar_optimal_gain(const fdr_scalar_node *node, fdr_scalar_solution *out);

/* Max-min selection across candidate relays (ties: lowest index). */
fdr_status fdr_scalar_select_relay(const fdr_scalar_node *nodes, size_t n_nodes, size_t *index_out,
                                   fdr_scalar_solution *out);

#ifdef __cplusplus
}
#endif

#endif /* FDRELAY_H */
