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

#include "bloomvec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bloomvec {

double fpr_estimate(double m_bits, double n, double k) {
  if (!(m_bits >= 1) || !(n >= 1) || !(k >= 1)) {
    throw std::domain_error("fpr_estimate requires m, n, k >= 1 (got m=" +
                            std::to_string(m_bits) + ", n=" +
                            std::to_string(n) + ", k=" + std::to_string(k) +
                            ")");
  }
  // -expm1 keeps precision when k n / m is tiny.
  return std::pow(-std::expm1(-k * n / m_bits), k);
}

OptimalK optimal_k(double c) {
  if (!(c > 0)) {
    throw std::domain_error("optimal_k requires c > 0 (got " +
                            std::to_string(c) + ")");
  }
  const double exact = c * std::numbers::ln2;
  const double lo = std::max(1.0, std::floor(exact));
  const double hi = std::max(1.0, std::ceil(exact));
  // Per-element false-positive estimate: n = 1, m = c.
  auto f = [c](double k) { return std::pow(-std::expm1(-k / c), k); };
  const double best = f(hi) < f(lo) ? hi : lo;
  return {exact, static_cast<std::uint32_t>(best)};
}

double min_fpr(double c) {
  if (!(c > 0)) {
    throw std::domain_error("min_fpr requires c > 0 (got " +
                            std::to_string(c) + ")");
  }
  return std::pow(0.5, c * std::numbers::ln2);
}

std::uint64_t optimal_n(std::uint64_t m_effective, std::uint32_t k) {
  if (m_effective == 0 || k == 0) {
    throw std::domain_error("optimal_n requires m, k >= 1");
  }
  const double n = std::round(static_cast<double>(m_effective) *
                              std::numbers::ln2 / static_cast<double>(k));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

SizingResult capacity_for_fpr(std::uint64_t m_effective, double target_f) {
  if (!(target_f > 0 && target_f < 1)) {
    throw std::domain_error("target false-positive rate must lie in (0, 1), got " +
                            std::to_string(target_f));
  }
  if (m_effective == 0) throw std::domain_error("capacity_for_fpr requires m >= 1");
  SizingResult r;
  r.c = -std::log(target_f) / (std::numbers::ln2 * std::numbers::ln2);
  r.n_opt = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::floor(static_cast<double>(m_effective) / r.c)));
  r.k_opt = optimal_k(r.c).integer;
  r.f_predicted = fpr_estimate(static_cast<double>(m_effective),
                               static_cast<double>(r.n_opt), r.k_opt);
  return r;
}

}  // namespace bloomvec
