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
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bloomvec/config.hpp"
#include "bloomvec/hashing.hpp"
#include "bloomvec/layout.hpp"

namespace bloomvec {

struct BulkOptions {
  // Overrides both the config layout and the per-operation default.
  std::optional<Layout> layout;
  // Keys are split into this many contiguous ranges, one thread each.
  unsigned workers = 1;
};

class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bit storage plus addressing for one of the five Bloom filter variants.
//
// Words are S bits wide and stored little-endian inside 64-bit containers,
// so a 32-bit filter packs two words per container. All mutations are
// relaxed atomic OR operations: concurrent add/bulk_add calls from any
// number of threads never lose bits. A lookup racing an insert of the same
// key may see it partially inserted.
class Filter {
 public:
  // Throws ConfigError on an invalid config.
  explicit Filter(FilterConfig config);

  Filter(const Filter& other);
  Filter& operator=(const Filter& other);
  Filter(Filter&&) noexcept = default;
  Filter& operator=(Filter&&) noexcept = default;
  ~Filter() = default;

  const FilterConfig& config() const noexcept { return config_; }
  const Geometry& geometry() const noexcept { return geometry_; }
  const SaltTable& salts() const noexcept { return salts_; }

  // Throws ConfigError if the layout does not fit the block.
  void set_layout(std::optional<Layout> layout);

  void add(std::uint64_t key) noexcept { add_hash(base_hash(key, config_.seed)); }
  void add(std::span<const std::byte> key) noexcept {
    add_hash(base_hash(key, config_.seed));
  }
  bool contains(std::uint64_t key) const noexcept {
    return contains_hash(base_hash(key, config_.seed));
  }
  bool contains(std::span<const std::byte> key) const noexcept {
    return contains_hash(base_hash(key, config_.seed));
  }

  // Operate on an already computed base hash.
  void add_hash(std::uint64_t h) noexcept;
  bool contains_hash(std::uint64_t h) const noexcept;

  // Equivalent to add() on every key. Throws ConfigError for a layout
  // override that does not fit the block.
  void bulk_add(std::span<const std::uint64_t> keys,
                const BulkOptions& options = {});

  // out[i] = contains(keys[i]). `out` must have keys.size() elements.
  void bulk_contains(std::span<const std::uint64_t> keys, std::span<bool> out,
                     const BulkOptions& options = {}) const;
  std::vector<std::uint8_t> bulk_contains(std::span<const std::uint64_t> keys,
                                          const BulkOptions& options = {}) const;

  // Layout a bulk operation would use given `options`.
  Layout insert_layout(const BulkOptions& options = {}) const;
  Layout lookup_layout(const BulkOptions& options = {}) const;

  std::uint64_t popcount() const noexcept;
  // popcount / m_effective.
  double fill_ratio() const noexcept;

  std::uint64_t word_count() const noexcept { return geometry_.word_count; }
  // S-bit word `index`, zero-extended.
  std::uint64_t word(std::uint64_t index) const noexcept;
  std::span<const std::uint64_t> storage() const noexcept {
    return {words_.get(), containers_};
  }

  // Bit `bit` of the concatenated word array, i.e. bit (bit % S) of word
  // (bit / S). Used by the scalar reference path.
  bool test_bit(std::uint64_t bit) const noexcept;
  void set_bit(std::uint64_t bit) noexcept;

  void clear() noexcept;

  // Config (minus layout) and every word are equal.
  bool same_contents(const Filter& other) const noexcept;

  std::vector<std::byte> serialize() const;
  // Throws SerializationError on malformed input, ConfigError if the
  // header describes an invalid config.
  static Filter deserialize(std::span<const std::byte> bytes);

 private:
  struct AlignedFree {
    void operator()(std::uint64_t* p) const noexcept;
  };

  FilterConfig config_;
  Geometry geometry_;
  SaltTable salts_;
  std::size_t containers_ = 0;
  std::unique_ptr<std::uint64_t[], AlignedFree> words_;
};

inline constexpr char kSerializationMagic[4] = {'B', 'L', 'M', 'V'};
inline constexpr std::uint16_t kSerializationVersion = 1;
inline constexpr std::size_t kSerializationHeaderBytes = 46;

}  // namespace bloomvec
