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

#include "bloomvec/filter.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <new>

#include "kernels.hpp"

namespace bloomvec {

namespace {

constexpr std::size_t kStorageAlignment = 64;

std::uint64_t* allocate_zeroed(std::size_t containers) {
  const std::size_t bytes =
      std::max<std::size_t>(kStorageAlignment,
                            (containers * 8 + kStorageAlignment - 1) /
                                kStorageAlignment * kStorageAlignment);
  void* p = std::aligned_alloc(kStorageAlignment, bytes);
  if (p == nullptr) throw std::bad_alloc();
  std::memset(p, 0, bytes);
  return static_cast<std::uint64_t*>(p);
}

std::size_t containers_for(const Geometry& g) {
  return static_cast<std::size_t>((g.word_count * g.word_bits + 63) / 64);
}

}  // namespace

void Filter::AlignedFree::operator()(std::uint64_t* p) const noexcept {
  std::free(p);
}

Filter::Filter(FilterConfig config)
    : config_(config),
      geometry_(derive_geometry(config_)),
      salts_(make_salt_table(config_.seed, geometry_)),
      containers_(containers_for(geometry_)),
      words_(allocate_zeroed(containers_)) {}

Filter::Filter(const Filter& other)
    : config_(other.config_),
      geometry_(other.geometry_),
      salts_(other.salts_),
      containers_(other.containers_),
      words_(allocate_zeroed(containers_)) {
  std::memcpy(words_.get(), other.words_.get(), containers_ * 8);
}

Filter& Filter::operator=(const Filter& other) {
  if (this != &other) *this = Filter(other);
  return *this;
}

void Filter::set_layout(std::optional<Layout> layout) {
  if (layout) {
    if (auto err = validate_layout(*layout, geometry_.words_per_block)) {
      throw ConfigError("layout: " + *err);
    }
  }
  config_.layout = layout;
}

Layout Filter::insert_layout(const BulkOptions& options) const {
  if (options.layout) return *options.layout;
  if (config_.layout) return *config_.layout;
  return default_insert_layout(geometry_.words_per_block);
}

Layout Filter::lookup_layout(const BulkOptions& options) const {
  if (options.layout) return *options.layout;
  if (config_.layout) return *config_.layout;
  return default_lookup_layout(geometry_.words_per_block);
}

namespace {

template <bool Insert>
void dispatch_blocked(const Geometry& g, const SaltTable& salts,
                      const detail::BlockedContext& ctx, std::uint32_t phi,
                      std::span<const std::uint64_t> keys, bool* out) {
  auto run = [&](const auto& masks) {
    detail::with_word_bits(g.word_bits, [&](auto word_bits) {
      detail::with_phi(phi, [&](auto phi_c) {
        detail::run_blocked<decltype(word_bits)::value, decltype(phi_c)::value,
                            Insert>(ctx, masks, keys, out);
      });
    });
  };
  switch (g.variant) {
    case Variant::kBlocked:
      run(detail::BlockedMasks(g, salts));
      break;
    case Variant::kRegisterBlocked:
    case Variant::kSectorized:
      run(detail::SectorizedMasks(g, salts));
      break;
    case Variant::kCacheSectorized:
      run(detail::CacheSectorizedMasks(g, salts));
      break;
    case Variant::kClassical:
      break;
  }
}

template <bool Insert>
void run_bulk(const Geometry& g, const SaltTable& salts, std::uint64_t seed,
              std::uint64_t* storage, const Layout& layout, unsigned workers,
              std::span<const std::uint64_t> keys, bool* out) {
  if (g.variant == Variant::kClassical) {
    const detail::ClassicalContext ctx{storage, seed, g.m_effective,
                                       salts.salts.data(), g.k};
    detail::parallel_ranges(keys.size(), workers,
                            [&](std::size_t begin, std::size_t end) {
                              detail::run_classical<Insert>(
                                  ctx, keys.subspan(begin, end - begin),
                                  out == nullptr ? nullptr : out + begin);
                            });
    return;
  }
  const detail::BlockedContext ctx{storage,
                                   seed,
                                   g.blocks,
                                   salts[g.block_salt_index()],
                                   g.words_per_block,
                                   layout.theta};
  detail::parallel_ranges(keys.size(), workers,
                          [&](std::size_t begin, std::size_t end) {
                            dispatch_blocked<Insert>(
                                g, salts, ctx, layout.phi,
                                keys.subspan(begin, end - begin),
                                out == nullptr ? nullptr : out + begin);
                          });
}

void check_layout(const Layout& layout, std::uint32_t words_per_block) {
  if (auto err = validate_layout(layout, words_per_block)) {
    throw ConfigError("layout: " + *err);
  }
}

}  // namespace

void Filter::add_hash(std::uint64_t h) noexcept {
  const Geometry& g = geometry_;
  if (g.variant == Variant::kClassical) {
    std::array<std::uint64_t, kMaxK> positions;
    const detail::ClassicalContext ctx{words_.get(), config_.seed,
                                       g.m_effective, salts_.salts.data(), g.k};
    detail::classical_one<true>(ctx, h, positions.data());
    return;
  }
  const std::uint64_t first =
      block_index(h, g.blocks, salts_[g.block_salt_index()]) * g.words_per_block;
  auto insert = [&](const auto& masks) {
    detail::with_word_bits(g.word_bits, [&](auto word_bits) {
      detail::insert_block<decltype(word_bits)::value, 1>(
          words_.get(), first, g.words_per_block, 1, masks, masks.prepare(h));
    });
  };
  switch (g.variant) {
    case Variant::kBlocked: insert(detail::BlockedMasks(g, salts_)); break;
    case Variant::kRegisterBlocked:
    case Variant::kSectorized: insert(detail::SectorizedMasks(g, salts_)); break;
    case Variant::kCacheSectorized:
      insert(detail::CacheSectorizedMasks(g, salts_));
      break;
    case Variant::kClassical: break;
  }
}

bool Filter::contains_hash(std::uint64_t h) const noexcept {
  const Geometry& g = geometry_;
  if (g.variant == Variant::kClassical) {
    std::array<std::uint64_t, kMaxK> positions;
    const detail::ClassicalContext ctx{words_.get(), config_.seed,
                                       g.m_effective, salts_.salts.data(), g.k};
    return detail::classical_one<false>(ctx, h, positions.data());
  }
  const std::uint64_t first =
      block_index(h, g.blocks, salts_[g.block_salt_index()]) * g.words_per_block;
  auto probe = [&](const auto& masks) {
    return detail::with_word_bits(g.word_bits, [&](auto word_bits) {
      return detail::probe_block<decltype(word_bits)::value, 1>(
          words_.get(), first, g.words_per_block, 1, masks, masks.prepare(h));
    });
  };
  switch (g.variant) {
    case Variant::kBlocked: return probe(detail::BlockedMasks(g, salts_));
    case Variant::kRegisterBlocked:
    case Variant::kSectorized: return probe(detail::SectorizedMasks(g, salts_));
    case Variant::kCacheSectorized:
      return probe(detail::CacheSectorizedMasks(g, salts_));
    case Variant::kClassical: break;
  }
  return false;
}

void Filter::bulk_add(std::span<const std::uint64_t> keys,
                      const BulkOptions& options) {
  const Layout layout = insert_layout(options);
  check_layout(layout, geometry_.words_per_block);
  run_bulk<true>(geometry_, salts_, config_.seed, words_.get(), layout,
                 options.workers, keys, nullptr);
}

void Filter::bulk_contains(std::span<const std::uint64_t> keys,
                           std::span<bool> out,
                           const BulkOptions& options) const {
  if (out.size() != keys.size()) {
    throw std::invalid_argument("bulk_contains: output size " +
                                std::to_string(out.size()) +
                                " does not match key count " +
                                std::to_string(keys.size()));
  }
  const Layout layout = lookup_layout(options);
  check_layout(layout, geometry_.words_per_block);
  run_bulk<false>(geometry_, salts_, config_.seed, words_.get(), layout,
                  options.workers, keys, out.data());
}

std::vector<std::uint8_t> Filter::bulk_contains(
    std::span<const std::uint64_t> keys, const BulkOptions& options) const {
  std::unique_ptr<bool[]> flags(new bool[keys.size()]);
  bulk_contains(keys, std::span<bool>(flags.get(), keys.size()), options);
  return std::vector<std::uint8_t>(flags.get(), flags.get() + keys.size());
}

std::uint64_t Filter::popcount() const noexcept {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < containers_; ++i) {
    total += static_cast<std::uint64_t>(
        std::popcount(detail::load_container(words_.get() + i)));
  }
  return total;
}

double Filter::fill_ratio() const noexcept {
  return static_cast<double>(popcount()) /
         static_cast<double>(geometry_.m_effective);
}

std::uint64_t Filter::word(std::uint64_t index) const noexcept {
  if (geometry_.word_bits == 32) {
    return detail::Words<32>::load(words_.get(), index);
  }
  return detail::Words<64>::load(words_.get(), index);
}

bool Filter::test_bit(std::uint64_t bit) const noexcept {
  return (detail::load_container(words_.get() + (bit >> 6)) >> (bit & 63)) & 1;
}

void Filter::set_bit(std::uint64_t bit) noexcept {
  detail::or_container(words_.get() + (bit >> 6), std::uint64_t{1} << (bit & 63));
}

void Filter::clear() noexcept {
  std::memset(words_.get(), 0, containers_ * 8);
}

bool Filter::same_contents(const Filter& other) const noexcept {
  const FilterConfig& a = config_;
  const FilterConfig& b = other.config_;
  if (a.variant != b.variant || a.m_bits != b.m_bits ||
      a.block_bits != b.block_bits || a.word_bits != b.word_bits ||
      a.k != b.k || a.z != b.z || a.seed != b.seed) {
    return false;
  }
  return std::memcmp(words_.get(), other.words_.get(), containers_ * 8) == 0;
}

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::byte>& out) : out_(out) {}
  template <class T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::byte>(
          (static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
  }

 private:
  std::vector<std::byte>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}
  template <class T>
  T get() {
    if (in_.size() - pos_ < sizeof(T)) {
      throw SerializationError("truncated filter data at byte " +
                               std::to_string(pos_));
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= std::uint64_t{std::to_integer<std::uint8_t>(in_[pos_ + i])} << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> Filter::serialize() const {
  std::vector<std::byte> out;
  out.reserve(kSerializationHeaderBytes + geometry_.word_count * geometry_.word_bits / 8);
  Writer w(out);
  for (char c : kSerializationMagic) w.put(static_cast<std::uint8_t>(c));
  w.put(kSerializationVersion);
  w.put(static_cast<std::uint8_t>(config_.variant));
  w.put(static_cast<std::uint8_t>(config_.word_bits));
  w.put(static_cast<std::uint16_t>(config_.k));
  w.put(static_cast<std::uint16_t>(config_.z));
  w.put(std::uint16_t{0});
  w.put(config_.m_bits);
  w.put(config_.block_bits);
  w.put(config_.seed);
  w.put(geometry_.word_count);
  for (std::uint64_t i = 0; i < geometry_.word_count; ++i) {
    if (geometry_.word_bits == 32) {
      w.put(static_cast<std::uint32_t>(word(i)));
    } else {
      w.put(word(i));
    }
  }
  return out;
}

Filter Filter::deserialize(std::span<const std::byte> bytes) {
  Reader r(bytes);
  for (char c : kSerializationMagic) {
    if (r.get<std::uint8_t>() != static_cast<std::uint8_t>(c)) {
      throw SerializationError("bad magic: not a bloomvec filter");
    }
  }
  const auto version = r.get<std::uint16_t>();
  if (version != kSerializationVersion) {
    throw SerializationError("unsupported format version " +
                             std::to_string(version));
  }
  FilterConfig config;
  const auto variant = r.get<std::uint8_t>();
  if (variant > static_cast<std::uint8_t>(Variant::kCacheSectorized)) {
    throw SerializationError("unknown variant code " + std::to_string(variant));
  }
  config.variant = static_cast<Variant>(variant);
  config.word_bits = r.get<std::uint8_t>();
  config.k = r.get<std::uint16_t>();
  config.z = r.get<std::uint16_t>();
  if (const auto reserved = r.get<std::uint16_t>(); reserved != 0) {
    throw SerializationError("reserved header field is " +
                             std::to_string(reserved) + ", expected 0");
  }
  config.m_bits = r.get<std::uint64_t>();
  config.block_bits = r.get<std::uint64_t>();
  config.seed = r.get<std::uint64_t>();
  const auto word_count = r.get<std::uint64_t>();

  Filter filter(config);
  if (word_count != filter.geometry_.word_count) {
    throw SerializationError("word count " + std::to_string(word_count) +
                             " does not match config (expected " +
                             std::to_string(filter.geometry_.word_count) + ")");
  }
  const std::uint64_t payload = word_count * (config.word_bits / 8);
  if (r.remaining() < payload) {
    throw SerializationError("truncated filter data: expected " +
                             std::to_string(payload) + " payload bytes, got " +
                             std::to_string(r.remaining()));
  }
  if (r.remaining() > payload) {
    throw SerializationError("unexpected " +
                             std::to_string(r.remaining() - payload) +
                             " trailing bytes after filter data");
  }
  for (std::uint64_t i = 0; i < word_count; ++i) {
    if (config.word_bits == 32) {
      detail::Words<32>::set(filter.words_.get(), i, r.get<std::uint32_t>());
    } else {
      detail::Words<64>::set(filter.words_.get(), i, r.get<std::uint64_t>());
    }
  }
  return filter;
}

}  // namespace bloomvec
