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

#ifndef fdrelay_matkernel_H
#define fdrelay_matkernel_H

#include "common.hpp"

namespace fdr
{

// Complex dense-matrix kernels shared by all designs: column-major
// vectorization, the three 0/1 selection matrices, Hermitian
// eigendecomposition and trace-capped PSD projection. The vec() convention is
// column-major throughout; every Kronecker identity in the toolkit assumes it.

enum class SelKind
{
    Transpose, // S_T vec(A) = vec(A^T)
    Diagonal,  // S_D vec(A) = vec(diag(A))
    Kron       // S_K vec(vec(A) vec(B)^T) = vec(A kron B)
};

struct SelectionMatrix
{
    SelKind kind;
    arma::uword rows_src = 0; // row count of the matrices the selection acts on
    arma::uword cols_src = 0;
    arma::mat entries; // dense 0/1

    arma::cx_mat cx() const
    {
        return arma::cx_mat(entries, arma::mat(entries.n_rows, entries.n_cols, arma::fill::zeros));
    }
};

inline arma::cx_vec vectorize(const arma::cx_mat &a)
{
    return arma::vectorise(a);
}

inline arma::cx_mat unvectorize(const arma::cx_vec &v, arma::uword rows, arma::uword cols)
{
    if (v.n_elem != rows * cols)
        throw std::invalid_argument("unvectorize: element count does not match target shape");
    return arma::reshape(arma::cx_mat(v), rows, cols);
}

// S_T vec(A) = vec(A^T) for A of shape rows x cols (commutation matrix).
SelectionMatrix selection_T(arma::uword rows, arma::uword cols);
inline SelectionMatrix selection_T(arma::uword m)
{
    return selection_T(m, m);
}

// S_D vec(A) = vec(diag(A)); square M x M source, diagonal 0/1 mask.
SelectionMatrix selection_D(arma::uword m);

// S_K vec(vec(A) vec(B)^T) = vec(A kron B) for A, B both rows x cols.
SelectionMatrix selection_K(arma::uword rows, arma::uword cols);
inline SelectionMatrix selection_K(arma::uword m)
{
    return selection_K(m, m);
}

struct HermEig
{
    arma::cx_mat vectors;  // unitary, columns are eigenvectors
    arma::vec values;      // sorted descending
};

// Eigendecomposition of a Hermitian matrix; rejects inputs whose Hermitian
// residual max|A - A^H| exceeds 1e-10 * max|A|.
HermEig herm_eig(const arma::cx_mat &a);

// Projection of a Hermitian matrix onto {X >= 0, tr(X) <= p_cap}: shift the
// eigenvalues down by the smallest zeta >= 0 with sum (lambda - zeta)^+ within
// the cap, then clip at zero. zeta is found by an exact water-level
// computation over the sorted eigenvalues.
struct PsdProjection
{
    arma::cx_mat matrix;
    double zeta = 0.0;
};

PsdProjection psd_project_power(const arma::cx_mat &q_old, double p_cap);

// Hermitian square root and inverse square root via eigendecomposition.
// Eigenvalues below rank_tol * lambda_max are treated as zero (pseudo-inverse
// behaviour on the rank-deficient part).
arma::cx_mat herm_sqrt(const arma::cx_mat &a, double rank_tol = 1e-12);
arma::cx_mat herm_inv_sqrt(const arma::cx_mat &a, double rank_tol = 1e-12);

} // namespace fdr

#endif
