// Copyright 2026 The bloomvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace bloomvec {

// Closed-form accuracy of a classical Bloom filter. For blocked and
// sectorized variants these are optimistic lower bounds only.

// f = (1 - exp(-k n / m))^k. Throws std::domain_error unless m, n, k >= 1.
double fpr_estimate(double m_bits, double n, double k);

struct OptimalK {
  double exact;         // c ln 2
  std::uint32_t integer; // floor or ceil of `exact`, whichever gives lower f
};

// Throws std::domain_error unless c > 0.
OptimalK optimal_k(double bits_per_element);

// f_min = (1/2)^(c ln 2).
double min_fpr(double bits_per_element);

// round(m ln 2 / k), at least 1. The load at which the fill ratio is 1/2.
std::uint64_t optimal_n(std::uint64_t m_effective, std::uint32_t k);

struct SizingResult {
  double c = 0;             // bits per element
  std::uint32_t k_opt = 0;
  double f_predicted = 0;   // fpr_estimate at (m, n_opt, k_opt)
  std::uint64_t n_opt = 0;
};

// Inverts f_min for `target_f` in (0, 1): c = -ln f / (ln 2)^2,
// n = floor(m / c), k = optimal_k(c).
SizingResult capacity_for_fpr(std::uint64_t m_effective, double target_f);

}  // namespace bloomvec
