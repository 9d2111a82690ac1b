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

#include "bloomvec/config.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

namespace bloomvec {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kClassical: return "cbf";
    case Variant::kBlocked: return "bbf";
    case Variant::kRegisterBlocked: return "rbbf";
    case Variant::kSectorized: return "sbf";
    case Variant::kCacheSectorized: return "csbf";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (auto v : {Variant::kClassical, Variant::kBlocked,
                 Variant::kRegisterBlocked, Variant::kSectorized,
                 Variant::kCacheSectorized}) {
    if (lower == variant_name(v)) return v;
  }
  return std::nullopt;
}

namespace {

std::string str(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::optional<std::string> validate_config(const FilterConfig& c) {
  const auto raw = static_cast<unsigned>(c.variant);
  if (raw > static_cast<unsigned>(Variant::kCacheSectorized)) {
    return "unknown variant " + str(raw);
  }
  if (c.m_bits == 0) return std::string("m must be at least 1 bit");
  if (c.m_bits > kMaxBits) {
    return "m=" + str(c.m_bits) + " exceeds the supported maximum of " +
           str(kMaxBits) + " bits";
  }
  if (c.word_bits != 32 && c.word_bits != 64) {
    return "word size S=" + str(c.word_bits) + " must be 32 or 64";
  }
  if (c.k == 0) return std::string("k must be at least 1");
  if (c.k > kMaxK) {
    return "k=" + str(c.k) + " exceeds the supported maximum of " +
           str(kMaxK);
  }
  if (c.variant != Variant::kCacheSectorized && c.z != 0) {
    return "z applies only to csbf (got z=" + str(c.z) + ")";
  }

  std::uint32_t s = 1;
  if (c.variant != Variant::kClassical) {
    if (!std::has_single_bit(c.block_bits)) {
      return "block size B=" + str(c.block_bits) + " must be a power of two";
    }
    if (c.block_bits < c.word_bits) {
      return "block size B=" + str(c.block_bits) +
             " is smaller than word size S=" + str(c.word_bits);
    }
    if (c.block_bits / c.word_bits > kMaxWordsPerBlock) {
      return "B/S=" + str(c.block_bits / c.word_bits) +
             " words per block exceeds the supported maximum of " +
             str(kMaxWordsPerBlock);
    }
    s = static_cast<std::uint32_t>(c.block_bits / c.word_bits);
  }

  switch (c.variant) {
    case Variant::kClassical:
    case Variant::kBlocked:
      break;
    case Variant::kRegisterBlocked:
      if (c.block_bits != c.word_bits) {
        return "rbbf requires B == S (got B=" + str(c.block_bits) +
               ", S=" + str(c.word_bits) + ")";
      }
      break;
    case Variant::kSectorized:
      if (c.k < s) {
        return "sbf requires k >= s (k=" + str(c.k) + ", s=" + str(s) + ")";
      }
      if (c.k % s != 0) {
        return "sbf requires k to be a multiple of s (k mod s = " +
               str(c.k % s) + ", k=" + str(c.k) + ", s=" + str(s) + ")";
      }
      break;
    case Variant::kCacheSectorized:
      if (c.z == 0) return std::string("csbf requires z >= 1");
      if (c.z > s) {
        return "csbf requires z <= s (z=" + str(c.z) + ", s=" + str(s) + ")";
      }
      if (s % c.z != 0) {
        return "csbf requires z to divide s (z=" + str(c.z) +
               ", s=" + str(s) + ")";
      }
      if (c.k % c.z != 0) {
        return "csbf requires k to be a multiple of z (k mod z = " +
               str(c.k % c.z) + ", k=" + str(c.k) + ", z=" + str(c.z) + ")";
      }
      break;
  }

  if (c.layout) {
    if (auto err = validate_layout(*c.layout, s)) return "layout: " + *err;
  }
  return std::nullopt;
}

Geometry derive_geometry(const FilterConfig& c) {
  if (auto err = validate_config(c)) throw ConfigError(*err);

  Geometry g{};
  g.variant = c.variant;
  g.word_bits = c.word_bits;
  g.log2_word_bits = static_cast<std::uint32_t>(std::countr_zero(c.word_bits));
  g.k = c.k;
  g.z = c.z;
  if (c.variant == Variant::kClassical) {
    g.block_bits = 0;
    g.log2_block_bits = 0;
    g.words_per_block = 1;
    g.blocks = 1;
    g.m_effective = c.m_bits;
    g.word_count = (c.m_bits + c.word_bits - 1) / c.word_bits;
  } else {
    g.block_bits = c.block_bits;
    g.log2_block_bits =
        static_cast<std::uint32_t>(std::countr_zero(c.block_bits));
    g.words_per_block = static_cast<std::uint32_t>(c.block_bits / c.word_bits);
    g.blocks = (c.m_bits + c.block_bits - 1) / c.block_bits;
    g.m_effective = g.blocks * c.block_bits;
    g.word_count = g.blocks * g.words_per_block;
  }
  if (c.variant == Variant::kSectorized ||
      c.variant == Variant::kRegisterBlocked) {
    g.bits_per_word = c.k / g.words_per_block;
  }
  if (c.variant == Variant::kCacheSectorized) {
    g.bits_per_group = c.k / c.z;
    g.words_per_group = g.words_per_block / c.z;
    g.log2_words_per_group =
        static_cast<std::uint32_t>(std::countr_zero(g.words_per_group));
  }
  return g;
}

}  // namespace bloomvec
