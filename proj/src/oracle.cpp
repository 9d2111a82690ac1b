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

#include "bloomvec/oracle.hpp"

#include "bloomvec/bench.hpp"
#include "bloomvec/hashing.hpp"
#include "bloomvec/layout.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

namespace bloomvec::oracle {

namespace {

template <class BitOp>
bool for_each_pattern_bit(const Filter& filter, std::uint64_t key, BitOp&& op) {
  const Geometry& g = filter.geometry();
  const KeyPattern p =
      make_pattern(base_hash(key, filter.config().seed), g, filter.salts());
  if (g.variant == Variant::kClassical) {
    for (std::uint64_t bit : p.global_bits) {
      if (!op(bit)) return false;
    }
    return true;
  }
  const std::uint64_t first_bit = p.block_index * g.block_bits;
  for (std::uint32_t w = 0; w < g.words_per_block; ++w) {
    for (std::uint32_t j = 0; j < g.word_bits; ++j) {
      if ((p.word_masks[w] >> j) & 1) {
        if (!op(first_bit + std::uint64_t{w} * g.word_bits + j)) return false;
      }
    }
  }
  return true;
}

}  // namespace

void add(Filter& filter, std::uint64_t key) {
  for_each_pattern_bit(filter, key, [&](std::uint64_t bit) {
    filter.set_bit(bit);
    return true;
  });
}

bool contains(const Filter& filter, std::uint64_t key) {
  return for_each_pattern_bit(filter, key,
                              [&](std::uint64_t bit) { return filter.test_bit(bit); });
}

double measure_fpr(const FilterConfig& config, std::uint64_t n_insert,
                   std::uint64_t n_query, std::uint64_t key_seed) {
  if (n_query == 0) return 0.0;
  Filter filter(config);
  const KeyStream stream(key_seed);
  for (std::uint64_t i = 0; i < n_insert; ++i) add(filter, stream.insert_key(i));
  std::uint64_t positives = 0;
  for (std::uint64_t i = 0; i < n_query; ++i) {
    positives += contains(filter, stream.query_key(i)) ? 1 : 0;
  }
  return static_cast<double>(positives) / static_cast<double>(n_query);
}

FilterConfig random_config(std::mt19937_64& rng) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  FilterConfig c;
  c.variant = static_cast<Variant>(pick(0, 4));
  c.word_bits = pick(0, 1) ? 64 : 32;
  c.block_bits = std::uint64_t{64} << pick(0, 4);
  c.seed = rng();
  const std::uint32_t s = static_cast<std::uint32_t>(c.block_bits / c.word_bits);
  switch (c.variant) {
    case Variant::kClassical:
    case Variant::kBlocked:
      c.k = static_cast<std::uint32_t>(pick(1, 24));
      break;
    case Variant::kRegisterBlocked:
      c.block_bits = c.word_bits;
      c.k = static_cast<std::uint32_t>(pick(1, 16));
      break;
    case Variant::kSectorized:
      c.k = s * static_cast<std::uint32_t>(pick(1, s >= 16 ? 2 : 4));
      break;
    case Variant::kCacheSectorized: {
      const int log_s = std::countr_zero(s);
      c.z = 1u << pick(0, static_cast<std::uint64_t>(log_s));
      c.k = c.z * static_cast<std::uint32_t>(pick(1, c.z >= 16 ? 2 : 4));
      break;
    }
  }
  // Ragged: not a whole number of blocks.
  c.m_bits = c.block_bits * pick(64, 512) + pick(0, c.block_bits - 1);
  return c;
}

std::optional<std::string> check_equivalence(
    const FilterConfig& config, std::span<const std::uint64_t> members,
    std::span<const std::uint64_t> non_members, unsigned workers) {
  FilterConfig base = config;
  base.layout.reset();
  Filter reference(base);
  for (std::uint64_t key : members) add(reference, key);

  std::vector<std::uint64_t> queries(members.begin(), members.end());
  queries.insert(queries.end(), non_members.begin(), non_members.end());
  std::vector<std::uint8_t> expected(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    expected[i] = contains(reference, queries[i]) ? 1 : 0;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!expected[i]) return std::string("reference path lost an inserted key");
  }

  const std::string where = std::string(variant_name(config.variant)) +
                            " B=" + std::to_string(config.block_bits) +
                            " S=" + std::to_string(config.word_bits) +
                            " k=" + std::to_string(config.k) +
                            " z=" + std::to_string(config.z);
  {
    Filter single(base);
    for (std::uint64_t key : members) single.add(key);
    if (!single.same_contents(reference)) {
      return where + ": add() differs from the reference bits";
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (single.contains(queries[i]) != (expected[i] != 0)) {
        return where + ": contains() differs from the reference answer";
      }
    }
  }
  for (const Layout& layout : enumerate_layouts(reference.geometry().words_per_block)) {
    Filter bulk(base);
    bulk.bulk_add(members, BulkOptions{layout, 1});
    if (!bulk.same_contents(reference)) {
      return where + ": bulk_add under " + to_string(layout) +
             " differs from the reference bits";
    }
    if (bulk.bulk_contains(queries, BulkOptions{layout, 1}) != expected) {
      return where + ": bulk_contains under " + to_string(layout) +
             " differs from the reference answers";
    }
    if (bulk.bulk_contains(queries, BulkOptions{layout, workers}) != expected) {
      return where + ": bulk_contains with " + std::to_string(workers) +
             " workers under " + to_string(layout) + " differs";
    }
  }
  {
    Filter parallel(base);
    parallel.bulk_add(members, BulkOptions{std::nullopt, workers});
    if (!parallel.same_contents(reference)) {
      return where + ": bulk_add with " + std::to_string(workers) +
             " workers differs from the reference bits";
    }
  }
  return std::nullopt;
}

bool run_selftest(std::ostream& log, const SelftestOptions& options) {
  std::mt19937_64 rng(options.seed);
  bool ok = true;
  auto fail = [&](const std::string& what) {
    log << "FAIL " << what << '\n';
    ok = false;
  };
  const KeyStream stream(options.seed);
  std::vector<std::uint64_t> members(options.keys);
  std::vector<std::uint64_t> fresh(options.keys);
  for (std::uint64_t i = 0; i < options.keys; ++i) {
    members[i] = stream.insert_key(i);
    fresh[i] = stream.query_key(i);
  }

  for (std::uint32_t i = 0; i < options.configs; ++i) {
    FilterConfig config = random_config(rng);
    // The first five cover every variant.
    while (i < 5 && config.variant != static_cast<Variant>(i)) {
      config = random_config(rng);
    }
    if (auto mismatch = check_equivalence(config, members, fresh)) {
      fail(*mismatch);
      continue;
    }

    Filter filter(config);
    const std::size_t half = members.size() / 2;
    const auto first = std::span<const std::uint64_t>(members).first(half);
    filter.bulk_add(first);
    const auto before = filter.bulk_contains(fresh);
    filter.bulk_add(std::span<const std::uint64_t>(members).subspan(half));
    const auto after = filter.bulk_contains(fresh);
    for (std::size_t q = 0; q < fresh.size(); ++q) {
      if (before[q] && !after[q]) {
        fail("monotonicity: an answer flipped from true to false");
        break;
      }
    }
    const auto answers = filter.bulk_contains(members);
    if (std::find(answers.begin(), answers.end(), 0) != answers.end()) {
      fail("false negative in " + std::string(variant_name(config.variant)));
    }
    const Filter restored = Filter::deserialize(filter.serialize());
    if (!restored.same_contents(filter)) fail("serialization round trip");
  }
  log << (ok ? "selftest passed" : "selftest FAILED") << " (" << options.configs
      << " configurations, " << options.keys << " keys each)\n";
  return ok;
}

}  // namespace bloomvec::oracle
