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
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>

#include "bloomvec/config.hpp"
#include "bloomvec/filter.hpp"

namespace bloomvec::oracle {

// Scalar reference path: one key, one bit at a time, from make_pattern.
// Shares hashing and salts with Filter but none of its kernels.

void add(Filter& filter, std::uint64_t key);
bool contains(const Filter& filter, std::uint64_t key);

// Inserts `n_insert` generated keys into a fresh filter with the scalar
// path, queries `n_query` disjoint keys and returns the positive fraction.
double measure_fpr(const FilterConfig& config, std::uint64_t n_insert,
                   std::uint64_t n_query, std::uint64_t key_seed);

// A random valid configuration: any variant, B in [64, 1024], S in
// {32, 64}, small m with a ragged last block.
FilterConfig random_config(std::mt19937_64& rng);

// Builds the filter for `members` with the scalar path and with every bulk
// path (each valid layout, single and multiple workers) and compares word
// arrays and query answers on members and `non_members`. Returns a
// description of the first mismatch.
std::optional<std::string> check_equivalence(
    const FilterConfig& config, std::span<const std::uint64_t> members,
    std::span<const std::uint64_t> non_members, unsigned workers = 8);

struct SelftestOptions {
  std::uint32_t configs = 60;
  std::uint64_t keys = 2000;
  std::uint64_t seed = 1;
};

// Equivalence plus no-false-negative, monotonicity and serialization
// checks over random configurations. Logs one line per failure.
bool run_selftest(std::ostream& log, const SelftestOptions& options = {});

}  // namespace bloomvec::oracle
