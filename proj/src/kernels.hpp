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

// Block kernels behind Filter's single and bulk operations.
//
// A key is processed in two stages. The strip stage hashes a run of keys
// once each, resolves their blocks and prefetches them. The cooperative
// stage then walks each key's block under the requested layout: `theta`
// lanes, each loading `Phi` contiguous words per step, with every lane
// generating the masks for its own words from the shared hash.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "bloomvec/config.hpp"
#include "bloomvec/hashing.hpp"

namespace bloomvec::detail {

inline constexpr std::size_t kStripKeys = 32;
inline constexpr std::size_t kCacheLineBytes = 64;

inline std::uint64_t load_container(const std::uint64_t* p) noexcept {
  return std::atomic_ref<std::uint64_t>(*const_cast<std::uint64_t*>(p))
      .load(std::memory_order_relaxed);
}

inline void or_container(std::uint64_t* p, std::uint64_t mask) noexcept {
  std::atomic_ref<std::uint64_t> ref(*p);
  if ((ref.load(std::memory_order_relaxed) & mask) != mask) {
    ref.fetch_or(mask, std::memory_order_relaxed);
  }
}

template <unsigned S>
struct Words;

template <>
struct Words<64> {
  static std::uint64_t load(const std::uint64_t* base, std::uint64_t w) noexcept {
    return load_container(base + w);
  }
  static void set(std::uint64_t* base, std::uint64_t w, std::uint64_t mask) noexcept {
    or_container(base + w, mask);
  }
  static const void* address(const std::uint64_t* base, std::uint64_t w) noexcept {
    return base + w;
  }
};

// Two 32-bit words per container, word 2i in the low half.
template <>
struct Words<32> {
  static std::uint64_t load(const std::uint64_t* base, std::uint64_t w) noexcept {
    return (load_container(base + (w >> 1)) >> ((w & 1) * 32)) & 0xFFFFFFFFu;
  }
  static void set(std::uint64_t* base, std::uint64_t w, std::uint64_t mask) noexcept {
    or_container(base + (w >> 1), mask << ((w & 1) * 32));
  }
  static const void* address(const std::uint64_t* base, std::uint64_t w) noexcept {
    return base + (w >> 1);
  }
};

// SBF, and RBBF as its single-word case: word w takes bits_per_word draws
// from its own contiguous salt range.
struct SectorizedMasks {
  const std::uint64_t* bit_salts;
  std::uint32_t bits_per_word;
  std::uint32_t log2_word_bits;

  struct State {
    std::uint64_t h;
  };

  explicit SectorizedMasks(const Geometry& g, const SaltTable& salts)
      : bit_salts(salts.salts.data()),
        bits_per_word(g.bits_per_word),
        log2_word_bits(g.log2_word_bits) {}

  State prepare(std::uint64_t h) const noexcept { return {h}; }

  std::uint64_t mask(const State& st, std::uint32_t w) const noexcept {
    const std::uint64_t* salt = bit_salts + std::size_t{w} * bits_per_word;
    std::uint64_t m = 0;
    for (std::uint32_t j = 0; j < bits_per_word; ++j) {
      m |= std::uint64_t{1} << multiply_shift(st.h, salt[j], log2_word_bits);
    }
    return m;
  }
};

// CSBF: group selection is key-uniform and resolved once in prepare().
struct CacheSectorizedMasks {
  const std::uint64_t* bit_salts;
  const std::uint64_t* group_salts;
  std::uint32_t groups;
  std::uint32_t bits_per_group;
  std::uint32_t words_per_group;
  std::uint32_t log2_words_per_group;
  std::uint32_t log2_word_bits;

  struct State {
    std::uint64_t h;
    std::array<std::uint8_t, kMaxWordsPerBlock> selected;
  };

  explicit CacheSectorizedMasks(const Geometry& g, const SaltTable& salts)
      : bit_salts(salts.salts.data()),
        group_salts(salts.salts.data() + g.group_salt_offset()),
        groups(g.z),
        bits_per_group(g.bits_per_group),
        words_per_group(g.words_per_group),
        log2_words_per_group(g.log2_words_per_group),
        log2_word_bits(g.log2_word_bits) {}

  State prepare(std::uint64_t h) const noexcept {
    State st;
    st.h = h;
    for (std::uint32_t grp = 0; grp < groups; ++grp) {
      st.selected[grp] = static_cast<std::uint8_t>(
          multiply_shift(h, group_salts[grp], log2_words_per_group));
    }
    return st;
  }

  std::uint64_t mask(const State& st, std::uint32_t w) const noexcept {
    const std::uint32_t grp = w >> log2_words_per_group;
    if ((w & (words_per_group - 1)) != st.selected[grp]) return 0;
    const std::uint64_t* salt = bit_salts + std::size_t{grp} * bits_per_group;
    std::uint64_t m = 0;
    for (std::uint32_t j = 0; j < bits_per_group; ++j) {
      m |= std::uint64_t{1} << multiply_shift(st.h, salt[j], log2_word_bits);
    }
    return m;
  }
};

// BBF: k draws over the whole block land unevenly across words, so the
// full block mask is built once per key and shared by all lanes.
struct BlockedMasks {
  const std::uint64_t* bit_salts;
  std::uint32_t k;
  std::uint32_t words_per_block;
  std::uint32_t log2_block_bits;
  std::uint32_t log2_word_bits;

  struct State {
    std::array<std::uint64_t, kMaxWordsPerBlock> masks;
  };

  explicit BlockedMasks(const Geometry& g, const SaltTable& salts)
      : bit_salts(salts.salts.data()),
        k(g.k),
        words_per_block(g.words_per_block),
        log2_block_bits(g.log2_block_bits),
        log2_word_bits(g.log2_word_bits) {}

  State prepare(std::uint64_t h) const noexcept {
    State st;
    std::fill_n(st.masks.begin(), words_per_block, 0);
    const std::uint32_t bit_mask = (1u << log2_word_bits) - 1;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint32_t pos = multiply_shift(h, bit_salts[i], log2_block_bits);
      st.masks[pos >> log2_word_bits] |= std::uint64_t{1} << (pos & bit_mask);
    }
    return st;
  }

  std::uint64_t mask(const State& st, std::uint32_t w) const noexcept {
    return st.masks[w];
  }
};

template <unsigned S, unsigned Phi, class Masks>
bool probe_block(const std::uint64_t* storage, std::uint64_t first_word,
                 std::uint32_t words_per_block, std::uint32_t theta,
                 const Masks& masks,
                 const typename Masks::State& st) noexcept {
  const std::uint32_t stride = theta * Phi;
  for (std::uint32_t step_base = 0; step_base < words_per_block;
       step_base += stride) {
    bool hit = true;
    for (std::uint32_t lane = 0; lane < theta; ++lane) {
      const std::uint32_t w0 = step_base + lane * Phi;
      std::array<std::uint64_t, Phi> chunk;
      for (unsigned j = 0; j < Phi; ++j) {
        chunk[j] = Words<S>::load(storage, first_word + w0 + j);
      }
      for (unsigned j = 0; j < Phi; ++j) {
        const std::uint64_t m = masks.mask(st, w0 + j);
        hit &= (chunk[j] & m) == m;
      }
    }
    // Lanes vote once per step.
    if (!hit) return false;
  }
  return true;
}

template <unsigned S, unsigned Phi, class Masks>
void insert_block(std::uint64_t* storage, std::uint64_t first_word,
                  std::uint32_t words_per_block, std::uint32_t theta,
                  const Masks& masks,
                  const typename Masks::State& st) noexcept {
  const std::uint32_t stride = theta * Phi;
  for (std::uint32_t step_base = 0; step_base < words_per_block;
       step_base += stride) {
    for (std::uint32_t lane = 0; lane < theta; ++lane) {
      const std::uint32_t w0 = step_base + lane * Phi;
      std::array<std::uint64_t, Phi> chunk;
      for (unsigned j = 0; j < Phi; ++j) chunk[j] = masks.mask(st, w0 + j);
      for (unsigned j = 0; j < Phi; ++j) {
        if (chunk[j] != 0) Words<S>::set(storage, first_word + w0 + j, chunk[j]);
      }
    }
  }
}

struct BlockedContext {
  std::uint64_t* storage;
  std::uint64_t seed;
  std::uint64_t blocks;
  std::uint64_t block_salt;
  std::uint32_t words_per_block;
  std::uint32_t theta;
};

template <unsigned S>
inline void prefetch_block(const std::uint64_t* storage, std::uint64_t first_word,
                           std::uint32_t words_per_block, bool for_write) noexcept {
  const auto* begin = static_cast<const char*>(Words<S>::address(storage, first_word));
  const std::size_t bytes = std::size_t{words_per_block} * (S / 8);
  for (std::size_t off = 0; off < bytes; off += kCacheLineBytes) {
    if (for_write) {
      __builtin_prefetch(begin + off, 1, 3);
    } else {
      __builtin_prefetch(begin + off, 0, 3);
    }
  }
}

// Strip-mined bulk driver for block-addressed variants. `out` is ignored
// for inserts.
template <unsigned S, unsigned Phi, bool Insert, class Masks>
void run_blocked(const BlockedContext& ctx, const Masks& masks,
                 std::span<const std::uint64_t> keys, bool* out) noexcept {
  std::array<std::uint64_t, kStripKeys> hashes;
  std::array<std::uint64_t, kStripKeys> first_words;
  std::array<bool, kStripKeys> results;
  for (std::size_t base = 0; base < keys.size(); base += kStripKeys) {
    const std::size_t count = std::min(kStripKeys, keys.size() - base);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t h = base_hash(keys[base + i], ctx.seed);
      hashes[i] = h;
      first_words[i] =
          block_index(h, ctx.blocks, ctx.block_salt) * ctx.words_per_block;
      prefetch_block<S>(ctx.storage, first_words[i], ctx.words_per_block, Insert);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto st = masks.prepare(hashes[i]);
      if constexpr (Insert) {
        insert_block<S, Phi>(ctx.storage, first_words[i], ctx.words_per_block,
                             ctx.theta, masks, st);
      } else {
        results[i] = probe_block<S, Phi>(ctx.storage, first_words[i],
                                         ctx.words_per_block, ctx.theta,
                                         masks, st);
      }
    }
    if constexpr (!Insert) std::copy_n(results.begin(), count, out + base);
  }
}

struct ClassicalContext {
  std::uint64_t* storage;
  std::uint64_t seed;
  std::uint64_t m_bits;
  const std::uint64_t* bit_salts;
  std::uint32_t k;
};

template <bool Insert>
bool classical_one(const ClassicalContext& ctx, std::uint64_t h,
                   std::uint64_t* positions) noexcept {
  for (std::uint32_t i = 0; i < ctx.k; ++i) {
    positions[i] = fast_range(h * ctx.bit_salts[i], ctx.m_bits);
    __builtin_prefetch(ctx.storage + (positions[i] >> 6), Insert ? 1 : 0, 3);
  }
  for (std::uint32_t i = 0; i < ctx.k; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (positions[i] & 63);
    std::uint64_t* container = ctx.storage + (positions[i] >> 6);
    if constexpr (Insert) {
      or_container(container, bit);
    } else {
      if ((load_container(container) & bit) == 0) return false;
    }
  }
  return true;
}

template <bool Insert>
void run_classical(const ClassicalContext& ctx,
                   std::span<const std::uint64_t> keys, bool* out) {
  std::vector<std::uint64_t> positions(ctx.k);
  std::array<std::uint64_t, kStripKeys> hashes;
  for (std::size_t base = 0; base < keys.size(); base += kStripKeys) {
    const std::size_t count = std::min(kStripKeys, keys.size() - base);
    for (std::size_t i = 0; i < count; ++i) {
      hashes[i] = base_hash(keys[base + i], ctx.seed);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const bool hit = classical_one<Insert>(ctx, hashes[i], positions.data());
      if constexpr (!Insert) out[base + i] = hit;
    }
  }
}

template <class F>
decltype(auto) with_phi(std::uint32_t phi, F&& f) {
  switch (phi) {
    case 1: return f(std::integral_constant<unsigned, 1>{});
    case 2: return f(std::integral_constant<unsigned, 2>{});
    case 4: return f(std::integral_constant<unsigned, 4>{});
    case 8: return f(std::integral_constant<unsigned, 8>{});
    case 16: return f(std::integral_constant<unsigned, 16>{});
    case 32: return f(std::integral_constant<unsigned, 32>{});
    default: return f(std::integral_constant<unsigned, 64>{});
  }
}

template <class F>
decltype(auto) with_word_bits(std::uint32_t word_bits, F&& f) {
  if (word_bits == 32) return f(std::integral_constant<unsigned, 32>{});
  return f(std::integral_constant<unsigned, 64>{});
}

// Splits [0, n) into `workers` contiguous, strip-aligned ranges and runs
// fn(begin, end) for each, on the calling thread plus workers - 1 others.
template <class F>
void parallel_ranges(std::size_t n, unsigned workers, F&& fn) {
  if (workers <= 1 || n <= kStripKeys) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  chunk = (chunk + kStripKeys - 1) / kStripKeys * kStripKeys;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  std::size_t begin = chunk;
  for (; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
}

}  // namespace bloomvec::detail
