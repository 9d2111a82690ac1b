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

#include "bloomvec/hashing.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace bloomvec {

namespace {

using namespace detail;

std::uint64_t read64(const std::byte* p) noexcept {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

std::uint32_t read32(const std::byte* p) noexcept {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  return v;
}

std::uint64_t round(std::uint64_t acc, std::uint64_t input) noexcept {
  acc += input * kPrime64_2;
  acc = rotl64(acc, 31);
  return acc * kPrime64_1;
}

std::uint64_t merge_round(std::uint64_t acc, std::uint64_t val) noexcept {
  acc ^= round(0, val);
  return acc * kPrime64_1 + kPrime64_4;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t xxh64(std::span<const std::byte> data, std::uint64_t seed) noexcept {
  const std::byte* p = data.data();
  const std::byte* const end = p + data.size();
  std::uint64_t h;

  if (data.size() >= 32) {
    std::uint64_t v1 = seed + kPrime64_1 + kPrime64_2;
    std::uint64_t v2 = seed + kPrime64_2;
    std::uint64_t v3 = seed;
    std::uint64_t v4 = seed - kPrime64_1;
    const std::byte* const limit = end - 32;
    do {
      v1 = round(v1, read64(p));
      v2 = round(v2, read64(p + 8));
      v3 = round(v3, read64(p + 16));
      v4 = round(v4, read64(p + 24));
      p += 32;
    } while (p <= limit);
    h = rotl64(v1, 1) + rotl64(v2, 7) + rotl64(v3, 12) + rotl64(v4, 18);
    h = merge_round(h, v1);
    h = merge_round(h, v2);
    h = merge_round(h, v3);
    h = merge_round(h, v4);
  } else {
    h = seed + kPrime64_5;
  }
  h += static_cast<std::uint64_t>(data.size());

  while (end - p >= 8) {
    h ^= round(0, read64(p));
    h = rotl64(h, 27) * kPrime64_1 + kPrime64_4;
    p += 8;
  }
  if (end - p >= 4) {
    h ^= static_cast<std::uint64_t>(read32(p)) * kPrime64_1;
    h = rotl64(h, 23) * kPrime64_2 + kPrime64_3;
    p += 4;
  }
  while (p < end) {
    h ^= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(*p)) *
         kPrime64_5;
    h = rotl64(h, 11) * kPrime64_1;
    ++p;
  }
  return xxh64_avalanche(h);
}

SaltTable make_salt_table(std::uint64_t seed, std::size_t count) {
  if (count == 0) throw std::invalid_argument("salt count must be >= 1");
  SaltTable table;
  table.seed = seed;
  table.salts.reserve(count);
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t state = seed;
  while (table.salts.size() < count) {
    const std::uint64_t salt = splitmix64(state) | 1u;
    // 1 is odd but maps every hash to itself.
    if (salt == 1 || !seen.insert(salt).second) continue;
    table.salts.push_back(salt);
  }
  return table;
}

SaltTable make_salt_table(std::uint64_t seed, const Geometry& geometry) {
  return make_salt_table(seed, geometry.salt_count());
}

KeyPattern make_pattern(std::uint64_t h, const Geometry& g,
                        const SaltTable& salts) {
  KeyPattern p;
  const std::uint32_t s = g.words_per_block;
  if (g.variant == Variant::kClassical) {
    p.global_bits.reserve(g.k);
    for (std::uint32_t i = 0; i < g.k; ++i) {
      p.global_bits.push_back(fast_range(h * salts[i], g.m_effective));
    }
    return p;
  }

  p.block_index = block_index(h, g.blocks, salts[g.block_salt_index()]);
  p.word_masks.assign(s, 0);
  auto set = [&](std::uint32_t word, std::uint32_t bit) {
    p.word_masks[word] |= std::uint64_t{1} << bit;
  };

  switch (g.variant) {
    case Variant::kBlocked:
      for (std::uint32_t i = 0; i < g.k; ++i) {
        const std::uint32_t pos = multiply_shift(h, salts[i], g.log2_block_bits);
        set(pos >> g.log2_word_bits, pos & (g.word_bits - 1));
      }
      break;
    case Variant::kRegisterBlocked:
    case Variant::kSectorized:
      for (std::uint32_t w = 0; w < s; ++w) {
        for (std::uint32_t j = 0; j < g.bits_per_word; ++j) {
          const std::uint64_t salt = salts[w * g.bits_per_word + j];
          set(w, multiply_shift(h, salt, g.log2_word_bits));
        }
      }
      break;
    case Variant::kCacheSectorized:
      p.selected_word_per_group.reserve(g.z);
      for (std::uint32_t grp = 0; grp < g.z; ++grp) {
        const std::uint32_t offset = multiply_shift(
            h, salts[g.group_salt_offset() + grp], g.log2_words_per_group);
        p.selected_word_per_group.push_back(offset);
        const std::uint32_t word = grp * g.words_per_group + offset;
        for (std::uint32_t j = 0; j < g.bits_per_group; ++j) {
          const std::uint64_t salt = salts[grp * g.bits_per_group + j];
          set(word, multiply_shift(h, salt, g.log2_word_bits));
        }
      }
      break;
    case Variant::kClassical:
      break;
  }
  return p;
}

}  // namespace bloomvec
