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

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

namespace bloomvec {
namespace {

std::span<const std::byte> bytes_of(std::string_view s) {
  return std::as_bytes(std::span<const char>(s.data(), s.size()));
}

// Reference digests produced by the python-xxhash package (libxxhash).
TEST(Xxh64, MatchesPublishedDigestsForByteSequences) {
  EXPECT_EQ(xxh64(bytes_of(""), 0), 0xEF46DB3751D8E999ULL);
  EXPECT_EQ(xxh64(bytes_of("a"), 0), 0xD24EC4F1A98C6E5BULL);
  EXPECT_EQ(xxh64(bytes_of("abc"), 0), 0x44BC2CF5AD770999ULL);
  EXPECT_EQ(xxh64(bytes_of("Nobody inspects the spammish repetition"), 0),
            0xFBCEA83C8A378BF1ULL);
  EXPECT_EQ(xxh64(bytes_of("abcdefghijklmnopqrstuvwxyz0123456789ABCDEFGHIJKLMN"), 1),
            0x97F468701AE76731ULL);
  std::array<std::byte, 100> ramp;
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = std::byte(i);
  EXPECT_EQ(xxh64(ramp, 123), 0xDF5CA5A5FD66899AULL);
}

TEST(BaseHash, IntegerKeysHashTheirLittleEndianBytes) {
  EXPECT_EQ(base_hash(0, 0), 0x34C96ACDCADB1BBBULL);
  EXPECT_EQ(base_hash(1, 0), 0x9F29CB17A2A49995ULL);
  EXPECT_EQ(base_hash(0, 42), 0xB71B47EBDA15746CULL);
  EXPECT_EQ(base_hash(0x0123456789ABCDEFULL, 0x9E3779B97F4A7C15ULL),
            0x6182F1FB3CE6AFD9ULL);
  EXPECT_EQ(base_hash(12345, 7), 0x7CF8F9438B9804E3ULL);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t key = rng();
    const std::uint64_t seed = rng();
    std::array<std::byte, 8> le;
    for (int b = 0; b < 8; ++b) le[b] = std::byte((key >> (8 * b)) & 0xFF);
    ASSERT_EQ(base_hash(key, seed), base_hash(std::span<const std::byte>(le), seed));
  }
}

TEST(BaseHash, IsDeterministicAndCollisionFreeOnSmallKeys) {
  EXPECT_EQ(base_hash(987654321, 5), base_hash(987654321, 5));
  std::unordered_set<std::uint64_t> digests;
  for (std::uint64_t key = 0; key <= 10'000; ++key) {
    ASSERT_TRUE(digests.insert(base_hash(key, 42)).second) << "key " << key;
  }
}

TEST(SaltTable, SaltsAreOddDistinctAndReproducible) {
  const SaltTable t = make_salt_table(1, 4);
  ASSERT_EQ(t.size(), 4u);
  for (std::uint64_t s : t.salts) EXPECT_EQ(s & 1, 1u);
  EXPECT_EQ(std::unordered_set<std::uint64_t>(t.salts.begin(), t.salts.end()).size(), 4u);
  EXPECT_EQ(make_salt_table(1, 4), t);

  const SaltTable big = make_salt_table(99, 2000);
  EXPECT_EQ(std::unordered_set<std::uint64_t>(big.salts.begin(), big.salts.end()).size(),
            2000u);
  for (std::uint64_t s : big.salts) ASSERT_EQ(s & 1, 1u);
}

TEST(SaltTable, DifferentSeedsGiveDifferentTables) {
  const SaltTable a = make_salt_table(1, 64);
  const SaltTable b = make_salt_table(2, 64);
  int differing = 0;
  for (std::size_t i = 0; i < 64; ++i) differing += a[i] != b[i];
  EXPECT_GE(differing, 60);
}

TEST(SaltTable, ZeroCountIsRejected) {
  EXPECT_THROW(make_salt_table(1, 0), std::invalid_argument);
}

TEST(BlockIndex, EdgeCases) {
  const std::uint64_t salt = make_salt_table(5, 1)[0];
  for (std::uint64_t b : {1ull, 2ull, 7ull, 1000003ull}) {
    EXPECT_EQ(block_index(0, b, salt), 0u);
  }
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(block_index(rng(), 1, salt), 0u);
}

TEST(BlockIndex, IsUniformForNonPowerOfTwoBlockCounts) {
  const std::uint64_t salt = make_salt_table(5, 1)[0];
  constexpr int kBlocks = 7;
  constexpr int kSamples = 1'000'000;
  std::array<int, kBlocks> counts{};
  std::mt19937_64 rng(17);
  for (int i = 0; i < kSamples; ++i) {
    const std::uint64_t idx = block_index(rng(), kBlocks, salt);
    ASSERT_LT(idx, static_cast<std::uint64_t>(kBlocks));
    ++counts[idx];
  }
  for (int c : counts) {
    const double frac = static_cast<double>(c) / kSamples;
    EXPECT_NEAR(frac, 1.0 / kBlocks, 0.01 / kBlocks);
  }
}

TEST(MultiplyShift, InWordPositionsAreUniformPerSalt) {
  const SaltTable salts = make_salt_table(21, 3);
  constexpr int kDraws = 10'000'000;
  std::mt19937_64 rng(23);
  for (std::uint64_t salt : salts.salts) {
    std::array<int, 64> counts{};
    for (int i = 0; i < kDraws; ++i) ++counts[multiply_shift(rng(), salt, 6)];
    for (int c : counts) {
      EXPECT_NEAR(static_cast<double>(c) / kDraws, 1.0 / 64, 0.01 / 64);
    }
  }
}

Geometry geometry_for(Variant v, std::uint64_t m, std::uint64_t block,
                      std::uint32_t word, std::uint32_t k, std::uint32_t z = 0) {
  FilterConfig c;
  c.variant = v;
  c.m_bits = m;
  c.block_bits = block;
  c.word_bits = word;
  c.k = k;
  c.z = z;
  return derive_geometry(c);
}

TEST(MakePattern, SectorizedSpreadsBitsEvenly) {
  const Geometry g = geometry_for(Variant::kSectorized, 1 << 20, 256, 64, 16);
  const SaltTable salts = make_salt_table(3, g);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10'000; ++i) {
    const KeyPattern p = make_pattern(rng(), g, salts);
    ASSERT_EQ(p.word_masks.size(), 4u);
    ASSERT_LT(p.block_index, g.blocks);
    int total = 0;
    for (std::uint64_t mask : p.word_masks) {
      ASSERT_GE(std::popcount(mask), 1);
      ASSERT_LE(std::popcount(mask), 4);
      total += std::popcount(mask);
    }
    ASSERT_LE(total, 16);
  }
}

TEST(MakePattern, CacheSectorizedSelectsOneWordPerGroup) {
  const Geometry g = geometry_for(Variant::kCacheSectorized, 1 << 20, 1024, 64, 16, 4);
  const SaltTable salts = make_salt_table(3, g);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10'000; ++i) {
    const KeyPattern p = make_pattern(rng(), g, salts);
    ASSERT_EQ(p.selected_word_per_group.size(), 4u);
    int nonzero = 0;
    for (std::uint32_t w = 0; w < 16; ++w) {
      const std::uint32_t grp = w / 4;
      const bool selected = w % 4 == p.selected_word_per_group[grp];
      if (selected) {
        ASSERT_GE(std::popcount(p.word_masks[w]), 1);
        ASSERT_LE(std::popcount(p.word_masks[w]), 4);
        ++nonzero;
      } else {
        ASSERT_EQ(p.word_masks[w], 0u);
      }
    }
    ASSERT_EQ(nonzero, 4);
  }
}

TEST(MakePattern, ClassicalAndBlockedStayInRange) {
  const Geometry cbf = geometry_for(Variant::kClassical, 1'000'003, 0, 64, 16);
  const Geometry bbf = geometry_for(Variant::kBlocked, 1'000'003, 512, 32, 13);
  const SaltTable cbf_salts = make_salt_table(8, cbf);
  const SaltTable bbf_salts = make_salt_table(8, bbf);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10'000; ++i) {
    const std::uint64_t h = rng();
    const KeyPattern a = make_pattern(h, cbf, cbf_salts);
    ASSERT_EQ(a.global_bits.size(), 16u);
    for (std::uint64_t bit : a.global_bits) ASSERT_LT(bit, 1'000'003u);
    const KeyPattern b = make_pattern(h, bbf, bbf_salts);
    ASSERT_LT(b.block_index, bbf.blocks);
    int total = 0;
    for (std::uint64_t mask : b.word_masks) {
      ASSERT_EQ(mask >> 32, 0u);
      total += std::popcount(mask);
    }
    ASSERT_GE(total, 1);
    ASSERT_LE(total, 13);
  }
}

TEST(MakePattern, IsDeterministic) {
  const Geometry g = geometry_for(Variant::kCacheSectorized, 1 << 16, 512, 32, 8, 8);
  EXPECT_EQ(make_pattern(77, g, make_salt_table(9, g)),
            make_pattern(77, g, make_salt_table(9, g)));
}

// Two random hashes share a full pattern only if they share the block and
// every in-block draw. With one draw per key that probability is exactly
// 1/(b * S) for RBBF and 1/m for CBF.
TEST(MakePattern, CollisionRateMatchesAnalyticBound) {
  constexpr int kTrials = 100'000;
  struct Case {
    Geometry g;
    double expected;
  };
  const Case cases[] = {
      {geometry_for(Variant::kRegisterBlocked, 16 * 64, 64, 64, 1), 1.0 / (16 * 64)},
      {geometry_for(Variant::kClassical, 1024, 0, 64, 1), 1.0 / 1024},
      {geometry_for(Variant::kSectorized, 64 * 256, 256, 64, 4), 1.0 / (64 * std::pow(64.0, 4))},
  };
  std::mt19937_64 rng(99);
  for (const Case& c : cases) {
    const SaltTable salts = make_salt_table(5, c.g);
    int collisions = 0;
    int same_block = 0;
    for (int i = 0; i < kTrials; ++i) {
      const std::uint64_t h1 = rng();
      std::uint64_t h2 = rng();
      while (h2 == h1) h2 = rng();
      const KeyPattern p1 = make_pattern(h1, c.g, salts);
      const KeyPattern p2 = make_pattern(h2, c.g, salts);
      same_block += p1.block_index == p2.block_index;
      collisions += p1 == p2;
    }
    const double mean = c.expected * kTrials;
    const double sigma = std::sqrt(mean);
    EXPECT_LE(collisions, same_block);
    EXPECT_NEAR(collisions, mean, 5 * sigma + 1) << "variant "
                                                  << variant_name(c.g.variant);
  }
}

}  // namespace
}  // namespace bloomvec
