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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bloomvec/config.hpp"

namespace bloomvec {

// XXH64 over an arbitrary byte sequence.
std::uint64_t xxh64(std::span<const std::byte> data, std::uint64_t seed) noexcept;

namespace detail {

inline constexpr std::uint64_t kPrime64_1 = 0x9E3779B185EBCA87ULL;
inline constexpr std::uint64_t kPrime64_2 = 0xC2B2AE3D27D4EB4FULL;
inline constexpr std::uint64_t kPrime64_3 = 0x165667B19E3779F9ULL;
inline constexpr std::uint64_t kPrime64_4 = 0x85EBCA77C2B2AE63ULL;
inline constexpr std::uint64_t kPrime64_5 = 0x27D4EB2F165667C5ULL;

constexpr std::uint64_t rotl64(std::uint64_t x, int r) noexcept {
  return (x << r) | (x >> (64 - r));
}

constexpr std::uint64_t xxh64_avalanche(std::uint64_t h) noexcept {
  h ^= h >> 33;
  h *= kPrime64_2;
  h ^= h >> 29;
  h *= kPrime64_3;
  h ^= h >> 32;
  return h;
}

}  // namespace detail

// Base hash of a 64-bit key: XXH64 of its 8-byte little-endian encoding.
constexpr std::uint64_t base_hash(std::uint64_t key, std::uint64_t seed) noexcept {
  using namespace detail;
  std::uint64_t h = seed + kPrime64_5 + 8;
  std::uint64_t lane = key * kPrime64_2;
  lane = rotl64(lane, 31) * kPrime64_1;
  h ^= lane;
  h = rotl64(h, 27) * kPrime64_1 + kPrime64_4;
  return xxh64_avalanche(h);
}

inline std::uint64_t base_hash(std::span<const std::byte> key,
                               std::uint64_t seed) noexcept {
  return xxh64(key, seed);
}

// High 64 bits of the 128-bit product.
constexpr std::uint64_t mul_high(std::uint64_t a, std::uint64_t b) noexcept {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) >> 64);
}

// Maps a uniform 64-bit value onto [0, range) without division.
constexpr std::uint64_t fast_range(std::uint64_t x, std::uint64_t range) noexcept {
  return mul_high(x, range);
}

// Multiply-shift: the top `log2_range` bits of h * salt. `log2_range` may be 0.
constexpr std::uint32_t multiply_shift(std::uint64_t h, std::uint64_t salt,
                                       std::uint32_t log2_range) noexcept {
  return log2_range == 0
             ? 0u
             : static_cast<std::uint32_t>((h * salt) >> (64 - log2_range));
}

constexpr std::uint64_t block_index(std::uint64_t h, std::uint64_t blocks,
                                    std::uint64_t block_salt) noexcept {
  return fast_range(h * block_salt, blocks);
}

// Ordered odd multipliers. Index layout is described by Geometry.
struct SaltTable {
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> salts;

  std::size_t size() const { return salts.size(); }
  std::uint64_t operator[](std::size_t i) const { return salts[i]; }
  friend bool operator==(const SaltTable&, const SaltTable&) = default;
};

// `count` pairwise-distinct odd constants from a splitmix64 sequence.
// Throws std::invalid_argument if count == 0.
SaltTable make_salt_table(std::uint64_t seed, std::size_t count);

// Salt table sized for a geometry.
SaltTable make_salt_table(std::uint64_t seed, const Geometry& geometry);

// Bits one key sets or tests.
struct KeyPattern {
  // Block-addressed variants: block index and one mask per word of the
  // block (S-bit masks stored in 64-bit integers).
  std::uint64_t block_index = 0;
  std::vector<std::uint64_t> word_masks;
  // CSBF only: chosen word per group, as an offset within the group.
  std::vector<std::uint32_t> selected_word_per_group;
  // CBF only: k global bit positions in [0, m), duplicates allowed.
  std::vector<std::uint64_t> global_bits;

  friend bool operator==(const KeyPattern&, const KeyPattern&) = default;
};

// Reference pattern generator. Straightforward and allocation-heavy; the
// filter's bulk kernels generate the same bits inline.
KeyPattern make_pattern(std::uint64_t h, const Geometry& geometry,
                        const SaltTable& salts);

}  // namespace bloomvec
