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

#ifndef fdrelay_rng_H
#define fdrelay_rng_H

#include "common.hpp"

#include <cstdint>

namespace fdr
{

// Splittable, fully deterministic random stream (xoshiro256++ core seeded via
// splitmix64). Standard-library distributions are avoided on purpose: their
// output is implementation defined, and experiment outputs must be
// reproducible byte-for-byte from (seed, stream key) alone.
class RngStream
{
  public:
    explicit RngStream(std::uint64_t seed);

    // Independent substream for (seed, index, tag). Streams with distinct keys
    // are statistically independent; equal keys reproduce the same sequence.
    static RngStream substream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller; one spare value is cached.
    double gaussian();

    // Circularly-symmetric complex normal CN(0, 1).
    cxd cgaussian();

    arma::cx_mat cgaussian_matrix(arma::uword rows, arma::uword cols);

  private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fdr

#endif
