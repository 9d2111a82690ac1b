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
#include <optional>
#include <string>
#include <vector>

namespace bloomvec {

// Vectorization layout of one cooperative block operation.
//
// `theta` lanes cooperate on a single key; each lane handles `phi`
// contiguous words per step, and the block is walked in strides of
// theta * phi words. Both must be powers of two and theta * phi <= s.
struct Layout {
  std::uint32_t theta = 1;
  std::uint32_t phi = 1;

  friend bool operator==(const Layout&, const Layout&) = default;
};

std::string to_string(const Layout& layout);

// Returns a description of the first violated constraint, or nullopt.
std::optional<std::string> validate_layout(const Layout& layout,
                                           std::uint32_t words_per_block);

// All valid layouts for `words_per_block`, ordered by (theta, phi).
std::vector<Layout> enumerate_layouts(std::uint32_t words_per_block);

// Number of strided steps needed to cover the block.
std::uint32_t layout_steps(const Layout& layout, std::uint32_t words_per_block);

// Word indices loaded by `lane` in `step`. Throws std::out_of_range for a
// lane >= theta or step >= layout_steps, std::invalid_argument for an
// invalid layout.
std::vector<std::uint32_t> word_assignment(const Layout& layout,
                                           std::uint32_t words_per_block,
                                           std::uint32_t lane,
                                           std::uint32_t step);

// Host defaults: lookups load up to four words per lane, inserts go word by
// word. Both are single-lane.
Layout default_lookup_layout(std::uint32_t words_per_block);
Layout default_insert_layout(std::uint32_t words_per_block);

}  // namespace bloomvec
