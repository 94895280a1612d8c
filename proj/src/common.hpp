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

#ifndef fdrelay_common_H
#define fdrelay_common_H

#include <armadillo>
#include <complex>
#include <stdexcept>
#include <string>

namespace fdr
{

using cxd = std::complex<double>;

// Raised when the relay distortion loop diverges, i.e. the spectral radius of
// the loop operator reaches 1 and the transmit covariance has no finite fixed
// point.
class instability_error : public std::runtime_error
{
  public:
    explicit instability_error(const std::string &what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error
{
  public:
    explicit io_error(const std::string &what) : std::runtime_error(what) {}
};

inline double db2lin(double x_db)
{
    return std::pow(10.0, x_db / 10.0);
}

inline double lin2db(double x_lin)
{
    return 10.0 * std::log10(x_lin);
}

} // namespace fdr

#endif
