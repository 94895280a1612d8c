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

#include "rng.hpp"

#include <cmath>

namespace fdr
{

namespace
{

std::uint64_t splitmix64(std::uint64_t &x)
{
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k)
{
    return (v << k) | (v >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed)
{
    std::uint64_t x = seed;
    for (auto &s : state_)
        s = splitmix64(x);
}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag)
{
    std::uint64_t x = seed;
    std::uint64_t a = splitmix64(x);
    x = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t b = splitmix64(x);
    x = b ^ (tag * 0x9e6c63d0876a9a67ULL + 0xda942042e4dd58b5ULL);
    return RngStream(splitmix64(x));
}

std::uint64_t RngStream::next_u64()
{
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 shifted away from 0 so log() stays finite.
    double u1 = uniform();
    double u2 = uniform();
    u1 = (u1 <= 0.0) ? 0x1.0p-53 : u1;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

cxd RngStream::cgaussian()
{
    const double re = gaussian();
    const double im = gaussian();
    return cxd(re, im) * M_SQRT1_2;
}

arma::cx_mat RngStream::cgaussian_matrix(arma::uword rows, arma::uword cols)
{
    arma::cx_mat out(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (arma::uword j = 0; j < cols; ++j)
        for (arma::uword i = 0; i < rows; ++i)
            out(i, j) = cgaussian();
    return out;
}

} // namespace fdr
