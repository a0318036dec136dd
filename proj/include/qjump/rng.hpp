// Copyright 2026 The qjump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace qjump {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Independent stream addressed by (seed, order, sample, lane). Draw i of a
// stream is a pure function of these coordinates, so results never depend on
// which thread evaluates a sample.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint32_t order, std::uint64_t sample, std::uint32_t lane = 0);

    std::uint64_t next_u64();
    // Uniform on (0, 1), 53-bit resolution.
    double next_double();

private:
    PhiloxKey key_;
    PhiloxCounter base_;
    std::uint32_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
};

}  // namespace qjump
