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

#include "bloomvec/layout.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace bloomvec {

std::string to_string(const Layout& layout) {
  return "(theta=" + std::to_string(layout.theta) +
         ", phi=" + std::to_string(layout.phi) + ")";
}

std::optional<std::string> validate_layout(const Layout& layout,
                                           std::uint32_t words_per_block) {
  if (!std::has_single_bit(layout.theta)) {
    return "theta=" + std::to_string(layout.theta) +
           " is not a power of two";
  }
  if (!std::has_single_bit(layout.phi)) {
    return "phi=" + std::to_string(layout.phi) + " is not a power of two";
  }
  const std::uint64_t width =
      std::uint64_t{layout.theta} * std::uint64_t{layout.phi};
  if (width > words_per_block) {
    return "theta*phi=" + std::to_string(width) +
           " exceeds words per block s=" + std::to_string(words_per_block);
  }
  return std::nullopt;
}

std::vector<Layout> enumerate_layouts(std::uint32_t words_per_block) {
  std::vector<Layout> out;
  if (!std::has_single_bit(words_per_block)) return out;
  const int log_s = std::countr_zero(words_per_block);
  for (int t = 0; t <= log_s; ++t) {
    for (int p = 0; t + p <= log_s; ++p) {
      out.push_back(Layout{1u << t, 1u << p});
    }
  }
  return out;
}

std::uint32_t layout_steps(const Layout& layout,
                           std::uint32_t words_per_block) {
  return words_per_block / (layout.theta * layout.phi);
}

std::vector<std::uint32_t> word_assignment(const Layout& layout,
                                           std::uint32_t words_per_block,
                                           std::uint32_t lane,
                                           std::uint32_t step) {
  if (auto err = validate_layout(layout, words_per_block)) {
    throw std::invalid_argument("invalid layout: " + *err);
  }
  if (lane >= layout.theta) {
    throw std::out_of_range("lane " + std::to_string(lane) +
                            " out of range for theta=" +
                            std::to_string(layout.theta));
  }
  if (step >= layout_steps(layout, words_per_block)) {
    throw std::out_of_range("step " + std::to_string(step) +
                            " out of range for " + to_string(layout) +
                            " with s=" + std::to_string(words_per_block));
  }
  const std::uint32_t first =
      step * layout.theta * layout.phi + lane * layout.phi;
  std::vector<std::uint32_t> words(layout.phi);
  for (std::uint32_t j = 0; j < layout.phi; ++j) words[j] = first + j;
  return words;
}

Layout default_lookup_layout(std::uint32_t words_per_block) {
  return Layout{1, std::min<std::uint32_t>(words_per_block, 4)};
}

Layout default_insert_layout(std::uint32_t /*words_per_block*/) {
  return Layout{1, 1};
}

}  // namespace bloomvec
