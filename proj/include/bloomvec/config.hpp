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
#include <stdexcept>
#include <string>
#include <string_view>

#include "bloomvec/layout.hpp"

namespace bloomvec {

// Wire values are part of the serialized format; do not reorder.
enum class Variant : std::uint8_t {
  kClassical = 0,        // CBF
  kBlocked = 1,          // BBF
  kRegisterBlocked = 2,  // RBBF
  kSectorized = 3,       // SBF
  kCacheSectorized = 4,  // CSBF
};

std::string_view variant_name(Variant v);
// Accepts the short names (cbf, bbf, rbbf, sbf, csbf), case-insensitive.
std::optional<Variant> parse_variant(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FilterConfig {
  Variant variant = Variant::kSectorized;
  std::uint64_t m_bits = 0;       // requested size; rounded up to whole blocks
  std::uint64_t block_bits = 256; // B; ignored by CBF
  std::uint32_t word_bits = 64;   // S, 32 or 64
  std::uint32_t k = 16;
  std::uint32_t z = 0;            // group count, CSBF only
  std::uint64_t seed = 0;
  // Runtime-only schedule for bulk operations. When unset, lookups and
  // inserts use their own defaults.
  std::optional<Layout> layout;
};

// Largest supported words-per-block. Bounds the per-key mask scratch space.
inline constexpr std::uint32_t kMaxWordsPerBlock = 64;
inline constexpr std::uint32_t kMaxK = 1024;
inline constexpr std::uint64_t kMaxBits = std::uint64_t{1} << 46;

// Quantities derived from a validated FilterConfig.
struct Geometry {
  Variant variant;
  std::uint32_t word_bits;       // S
  std::uint32_t log2_word_bits;
  std::uint64_t block_bits;      // B (CBF: 0)
  std::uint32_t log2_block_bits;
  std::uint32_t words_per_block; // s (CBF: 1)
  std::uint64_t blocks;          // b (CBF: 1)
  std::uint64_t m_effective;     // b*B, or m for CBF
  std::uint64_t word_count;      // number of S-bit words in storage
  std::uint32_t k;
  std::uint32_t z;
  std::uint32_t bits_per_word;   // k/s for SBF and RBBF
  std::uint32_t bits_per_group;  // k/z for CSBF
  std::uint32_t words_per_group; // s/z for CSBF
  std::uint32_t log2_words_per_group;

  // Salt table layout: k bit salts, one block salt, then group salts.
  std::uint32_t block_salt_index() const { return k; }
  std::uint32_t group_salt_offset() const { return k + 1; }
  std::uint32_t salt_count() const {
    return k + 1 + (variant == Variant::kClassical ? 0 : words_per_block);
  }
};

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> validate_config(const FilterConfig& config);

// Throws ConfigError if the config is invalid.
Geometry derive_geometry(const FilterConfig& config);

}  // namespace bloomvec
