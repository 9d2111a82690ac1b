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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bloomvec/config.hpp"
#include "bloomvec/layout.hpp"

namespace bloomvec {

class Filter;

// Deterministic distinct keys. Insert keys and query keys are images of
// disjoint halves of the 64-bit domain under one seeded bijection, so the
// two streams never intersect and neither repeats.
class KeyStream {
 public:
  explicit KeyStream(std::uint64_t seed);
  std::uint64_t insert_key(std::uint64_t index) const noexcept;
  std::uint64_t query_key(std::uint64_t index) const noexcept;

 private:
  std::uint64_t whitening_;
};

// Throws std::invalid_argument if count == 0.
std::vector<std::uint64_t> generate_unique_keys(std::uint64_t count,
                                                std::uint64_t seed);
// Disjoint from generate_unique_keys(·, seed) for any counts.
std::vector<std::uint64_t> generate_query_keys(std::uint64_t count,
                                               std::uint64_t seed);

enum class BenchOp { kAdd, kContains };
std::string_view op_name(BenchOp op);
std::optional<BenchOp> parse_op(std::string_view name);

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// Storage for keys or the filter could not be obtained.
class AllocationError : public BenchError {
 public:
  using BenchError::BenchError;
};

struct BenchReport {
  Variant variant = Variant::kSectorized;
  std::uint64_t m_bits = 0;
  std::uint64_t block_bits = 0;
  std::uint32_t word_bits = 0;
  std::uint32_t k = 0;
  std::uint32_t z = 0;
  Layout layout;
  BenchOp op = BenchOp::kContains;
  unsigned workers = 1;
  std::uint64_t keys = 0;       // per repetition
  std::uint32_t repetitions = 0;
  double elapsed_s = 0;         // summed over repetitions
  double throughput_eps = 0;    // keys * repetitions / elapsed_s
  double relative_stderr = 0;   // of the per-repetition time
  std::optional<double> fpr;
  std::optional<double> fill_ratio;
  std::optional<double> sol_fraction;  // throughput / random-access baseline
};

struct ThroughputOptions {
  unsigned workers = 1;
  std::optional<Layout> layout;
  std::uint32_t min_repetitions = 3;
  std::uint32_t max_repetitions = 20;
  double target_relative_stderr = 0.02;
  std::uint64_t key_seed = 42;
};

// Times bulk_add or bulk_contains over `key_count` fresh keys. Contains
// runs insert the keys first and check every lookup is positive. Key
// generation, allocation and verification are outside the timed region.
// Throws std::invalid_argument for key_count == 0, AllocationError if
// memory runs out, BenchError if a correctness check fails.
BenchReport measure_throughput(const FilterConfig& config, BenchOp op,
                               std::uint64_t key_count,
                               const ThroughputOptions& options = {});

struct FprResult {
  double fpr = 0;
  double fill_ratio = 0;
  std::uint64_t inserted = 0;
  std::uint64_t queries = 0;
  std::uint64_t positives = 0;
};

// Incremental false-positive measurement. The constructor inserts
// optimal_n(m_effective, k) keys; each query() call extends the stream of
// non-member queries, so estimates can be refined without rebuilding.
class FprMeter {
 public:
  FprMeter(const FilterConfig& config, std::uint64_t key_seed,
           unsigned workers = 1);
  FprMeter(FprMeter&&) noexcept;
  FprMeter& operator=(FprMeter&&) noexcept;
  ~FprMeter();

  void query(std::uint64_t count);
  FprResult result() const;
  const Filter& filter() const;

 private:
  std::unique_ptr<Filter> filter_;
  KeyStream stream_;
  unsigned workers_;
  FprResult result_;
};

// Inserts optimal_n(m_effective, k) keys, then counts positives among
// `query_count` keys that were not inserted.
FprResult measure_fpr(const FilterConfig& config, std::uint64_t query_count,
                      std::uint64_t key_seed, unsigned workers = 1);

struct GridResult {
  std::vector<BenchReport> rows;  // one per layout, enumerate_layouts order
  std::size_t best = 0;           // argmax throughput
};

// Benchmarks every valid layout. Throws BenchError if any layout answers
// a query differently from the single-lane, single-word layout.
GridResult layout_grid_search(const FilterConfig& config, BenchOp op,
                              std::uint64_t key_count,
                              const ThroughputOptions& options = {});

enum class AccessOp { kRead, kWrite };

// Random 64-bit reads, or OR-writes, into an array of `bytes`; returns
// accesses per second. The host's speed-of-light for a filter whose
// operations touch one random word.
double random_access_baseline(std::uint64_t bytes, AccessOp op,
                              std::uint64_t access_count, unsigned workers = 1,
                              std::uint64_t seed = 7);

struct FrontierSpec {
  std::vector<Variant> variants;
  std::vector<std::uint64_t> block_bits;
  std::vector<std::uint64_t> sizes_bits;
  std::uint32_t word_bits = 64;
  std::uint32_t k = 16;
  std::uint64_t seed = 1;
  std::uint64_t key_count = 10'000'000;
  std::uint64_t fpr_queries = 10'000'000;
  std::uint64_t baseline_accesses = 20'000'000;
  ThroughputOptions throughput;
};

// For every (variant, B, size) cell, and every z in {2, 4, ..., s} for
// CSBF: the best layout's add and contains throughput, measured FPR and
// fill ratio, and the throughput as a fraction of the random-access
// baseline. Rows are written to `csv` (with header) as they complete. A
// failing cell is reported to `errors` and skipped.
std::vector<BenchReport> frontier_sweep(const FrontierSpec& spec,
                                        std::ostream& csv,
                                        std::ostream& errors);

inline constexpr std::string_view kCsvHeader =
    "variant,m_bits,B,S,k,z,theta,phi,op,workers,keys,elapsed_s,"
    "throughput_eps,fpr,fill_ratio,sol_fraction";

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchReport& report);
void write_json(std::ostream& out, const std::vector<BenchReport>& reports);

// Populates the config fields of a report.
BenchReport describe(const FilterConfig& config, const Layout& layout,
                     BenchOp op, unsigned workers);

}  // namespace bloomvec
