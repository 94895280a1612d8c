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

#include "matkernel.hpp"

#include <algorithm>

namespace fdr
{

SelectionMatrix selection_T(arma::uword rows, arma::uword cols)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("selection_T: dimensions must be >= 1");
    const arma::uword n = rows * cols;
    SelectionMatrix s{SelKind::Transpose, rows, cols, arma::mat(n, n, arma::fill::zeros)};
    // Entry (i, j) of A sits at i + j*rows in vec(A) and at j + i*cols in
    // vec(A^T).
    for (arma::uword i = 0; i < rows; ++i)
        for (arma::uword j = 0; j < cols; ++j)
            s.entries(j + i * cols, i + j * rows) = 1.0;
    return s;
}

SelectionMatrix selection_D(arma::uword m)
{
    if (m < 1)
        throw std::invalid_argument("selection_D: dimension must be >= 1");
    const arma::uword n = m * m;
    SelectionMatrix s{SelKind::Diagonal, m, m, arma::mat(n, n, arma::fill::zeros)};
    for (arma::uword i = 0; i < m; ++i)
        s.entries(i * (m + 1), i * (m + 1)) = 1.0;
    return s;
}

SelectionMatrix selection_K(arma::uword rows, arma::uword cols)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("selection_K: dimensions must be >= 1");
    const arma::uword m = rows;
    const arma::uword n = cols;
    const arma::uword sz = m * n * m * n;
    SelectionMatrix s{SelKind::Kron, rows, cols, arma::mat(sz, sz, arma::fill::zeros)};
    // (A kron B)[i*m + k, j*n + l] = A[i,j] B[k,l]; the source entry sits at
    // position (i + j*m) + (k + l*m)*(m*n) of vec(vec(A) vec(B)^T).
    for (arma::uword i = 0; i < m; ++i)
        for (arma::uword j = 0; j < n; ++j)
            for (arma::uword k = 0; k < m; ++k)
                for (arma::uword l = 0; l < n; ++l)
                {
                    const arma::uword row = (i * m + k) + (j * n + l) * m * m;
                    const arma::uword col = (i + j * m) + (k + l * m) * m * n;
                    s.entries(row, col) = 1.0;
                }
    return s;
}

HermEig herm_eig(const arma::cx_mat &a)
{
    if (!a.is_square())
        throw std::invalid_argument("herm_eig: matrix must be square");
    const double scale = std::max(arma::abs(a).max(), 1e-300);
    const double herm_residual = arma::abs(a - a.t()).max();
    if (herm_residual > 1e-10 * scale)
        throw std::invalid_argument("herm_eig: input is not Hermitian within tolerance");

    const arma::cx_mat sym = 0.5 * (a + a.t());
    arma::vec values;
    arma::cx_mat vectors;
    if (!arma::eig_sym(values, vectors, sym))
        throw std::runtime_error("herm_eig: eigendecomposition failed to converge");

    // arma returns ascending order; the toolkit convention is descending.
    HermEig out;
    out.values = arma::reverse(values);
    out.vectors = arma::fliplr(vectors);
    return out;
}

PsdProjection psd_project_power(const arma::cx_mat &q_old, double p_cap)
{
    if (p_cap <= 0.0)
        throw std::invalid_argument("psd_project_power: power cap must be positive");

    const HermEig eig = herm_eig(q_old);
    const arma::vec &lam = eig.values; // descending

    double zeta = 0.0;
    double trace_clipped = 0.0;
    for (const double v : lam)
        trace_clipped += std::max(v, 0.0);

    if (trace_clipped > p_cap)
    {
        // Water level over the largest k with (sum_{i<=k} lam_i - p_cap)/k
        // below lam_k; the clipped trace is piecewise linear in zeta.
        double prefix = 0.0;
        double level = 0.0;
        for (arma::uword k = 0; k < lam.n_elem; ++k)
        {
            prefix += lam(k);
            const double candidate = (prefix - p_cap) / static_cast<double>(k + 1);
            if (candidate < lam(k))
                level = candidate;
            else
                break;
        }
        zeta = std::max(level, 0.0);
    }

    arma::vec lam_new = lam - zeta;
    lam_new.transform([](double v) { return std::max(v, 0.0); });

    PsdProjection out;
    out.zeta = zeta;
    out.matrix = eig.vectors * arma::diagmat(arma::conv_to<arma::cx_vec>::from(lam_new)) * eig.vectors.t();
    out.matrix = 0.5 * (out.matrix + out.matrix.t());
    return out;
}

namespace
{

arma::cx_mat herm_power(const arma::cx_mat &a, double exponent, double rank_tol)
{
    const HermEig eig = herm_eig(a);
    const double lam_max = eig.values.n_elem ? std::max(eig.values(0), 0.0) : 0.0;
    arma::vec powered(eig.values.n_elem, arma::fill::zeros);
    for (arma::uword i = 0; i < eig.values.n_elem; ++i)
    {
        const double v = eig.values(i);
        if (v > rank_tol * std::max(lam_max, 1e-300))
            powered(i) = std::pow(v, exponent);
    }
    arma::cx_mat out = eig.vectors * arma::diagmat(arma::conv_to<arma::cx_vec>::from(powered)) * eig.vectors.t();
    return 0.5 * (out + out.t());
}

} // namespace

arma::cx_mat herm_sqrt(const arma::cx_mat &a, double rank_tol)
{
    return herm_power(a, 0.5, rank_tol);
}

arma::cx_mat herm_inv_sqrt(const arma::cx_mat &a, double rank_tol)
{
    return herm_power(a, -0.5, rank_tol);
}

} // namespace fdr
