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

#include "bloomvec/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <new>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "bloomvec/analytics.hpp"
#include "bloomvec/filter.hpp"

namespace bloomvec {

namespace {

constexpr std::uint64_t kQueryDomainBit = std::uint64_t{1} << 63;
constexpr std::uint64_t kVerifySample = 4096;
constexpr std::uint64_t kChunkKeys = std::uint64_t{1} << 20;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Murmur3 finalizer; a bijection on 64-bit integers.
std::uint64_t fmix64(std::uint64_t x) noexcept {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  x ^= x >> 33;
  return x;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

template <class F>
double timed(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return seconds_since(start);
}

double relative_stderr(const std::vector<double>& samples) {
  if (samples.size() < 2) return INFINITY;
  double mean = 0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  return std::sqrt(var / static_cast<double>(samples.size())) / mean;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::uint8_t> answers(const Filter& filter,
                                  std::span<const std::uint64_t> keys,
                                  const Layout& layout) {
  return filter.bulk_contains(keys, BulkOptions{layout, 1});
}

}  // namespace

KeyStream::KeyStream(std::uint64_t seed) : whitening_(splitmix64(seed)) {}

std::uint64_t KeyStream::insert_key(std::uint64_t index) const noexcept {
  return fmix64((index & ~kQueryDomainBit) ^ whitening_);
}

std::uint64_t KeyStream::query_key(std::uint64_t index) const noexcept {
  return fmix64((index | kQueryDomainBit) ^ whitening_);
}

std::vector<std::uint64_t> generate_unique_keys(std::uint64_t count,
                                                std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("key count must be >= 1");
  const KeyStream stream(seed);
  std::vector<std::uint64_t> keys(count);
  for (std::uint64_t i = 0; i < count; ++i) keys[i] = stream.insert_key(i);
  return keys;
}

std::vector<std::uint64_t> generate_query_keys(std::uint64_t count,
                                               std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("key count must be >= 1");
  const KeyStream stream(seed);
  std::vector<std::uint64_t> keys(count);
  for (std::uint64_t i = 0; i < count; ++i) keys[i] = stream.query_key(i);
  return keys;
}

std::string_view op_name(BenchOp op) {
  return op == BenchOp::kAdd ? "add" : "contains";
}

std::optional<BenchOp> parse_op(std::string_view name) {
  if (name == "add") return BenchOp::kAdd;
  if (name == "contains") return BenchOp::kContains;
  return std::nullopt;
}

BenchReport describe(const FilterConfig& config, const Layout& layout,
                     BenchOp op, unsigned workers) {
  BenchReport r;
  r.variant = config.variant;
  r.m_bits = config.m_bits;
  r.block_bits = config.variant == Variant::kClassical ? 0 : config.block_bits;
  r.word_bits = config.word_bits;
  r.k = config.k;
  r.z = config.z;
  r.layout = layout;
  r.op = op;
  r.workers = workers;
  return r;
}

BenchReport measure_throughput(const FilterConfig& config, BenchOp op,
                               std::uint64_t key_count,
                               const ThroughputOptions& options) {
  if (key_count == 0) {
    throw std::invalid_argument("benchmark needs at least one key");
  }
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::uint64_t> keys;
  std::optional<Filter> filter;
  std::unique_ptr<bool[]> results;
  try {
    keys = generate_unique_keys(key_count, options.key_seed);
    filter.emplace(config);
    if (op == BenchOp::kContains) results.reset(new bool[key_count]);
  } catch (const std::bad_alloc&) {
    throw AllocationError("could not allocate " + std::to_string(key_count) +
                          " keys and a " + std::to_string(config.m_bits) +
                          "-bit filter");
  }

  const BulkOptions bulk{options.layout, workers};
  const Layout layout = op == BenchOp::kAdd ? filter->insert_layout(bulk)
                                            : filter->lookup_layout(bulk);
  if (auto err = validate_layout(layout, filter->geometry().words_per_block)) {
    throw ConfigError("layout: " + *err);
  }
  const Layout reference{1, 1};
  const auto sample = std::span<const std::uint64_t>(keys).first(
      std::min(key_count, kVerifySample));

  if (op == BenchOp::kAdd) {
    filter->bulk_add(sample, bulk);
    for (std::uint64_t key : sample) {
      if (!filter->contains(key)) {
        throw BenchError("false negative after bulk_add under " +
                         to_string(layout));
      }
    }
    filter->clear();
  } else {
    filter->bulk_add(keys, BulkOptions{std::nullopt, workers});
    filter->bulk_contains(keys, std::span<bool>(results.get(), key_count), bulk);
    if (!std::all_of(results.get(), results.get() + key_count,
                     [](bool b) { return b; })) {
      throw BenchError("pre-populated filter missed an inserted key under " +
                       to_string(layout));
    }
    if (answers(*filter, sample, layout) != answers(*filter, sample, reference)) {
      throw BenchError("layout " + to_string(layout) +
                       " disagrees with the reference layout");
    }
  }

  BenchReport report = describe(config, layout, op, workers);
  report.keys = key_count;
  std::vector<double> times;
  const std::uint32_t max_reps = std::max(1u, options.max_repetitions);
  while (true) {
    double t;
    if (op == BenchOp::kAdd) {
      filter->clear();
      t = timed([&] { filter->bulk_add(keys, bulk); });
    } else {
      t = timed([&] {
        filter->bulk_contains(keys, std::span<bool>(results.get(), key_count), bulk);
      });
    }
    times.push_back(t);
    const double rse = relative_stderr(times);
    if (times.size() >= options.min_repetitions &&
        rse < options.target_relative_stderr) {
      break;
    }
    if (times.size() >= max_reps) break;
  }

  report.repetitions = static_cast<std::uint32_t>(times.size());
  for (double t : times) report.elapsed_s += t;
  report.throughput_eps = static_cast<double>(key_count) * report.repetitions /
                          report.elapsed_s;
  report.relative_stderr = times.size() < 2 ? 0.0 : relative_stderr(times);
  report.fill_ratio = filter->fill_ratio();
  return report;
}

FprMeter::FprMeter(const FilterConfig& config, std::uint64_t key_seed,
                   unsigned workers)
    : filter_(std::make_unique<Filter>(config)),
      stream_(key_seed),
      workers_(std::max(1u, workers)) {
  result_.inserted = optimal_n(filter_->geometry().m_effective, config.k);
  std::vector<std::uint64_t> chunk;
  chunk.reserve(std::min(kChunkKeys, result_.inserted));
  const BulkOptions bulk{std::nullopt, workers_};
  for (std::uint64_t base = 0; base < result_.inserted; base += kChunkKeys) {
    const std::uint64_t n = std::min(kChunkKeys, result_.inserted - base);
    chunk.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) chunk[i] = stream_.insert_key(base + i);
    filter_->bulk_add(chunk, bulk);
  }
  result_.fill_ratio = filter_->fill_ratio();
}

FprMeter::FprMeter(FprMeter&&) noexcept = default;
FprMeter& FprMeter::operator=(FprMeter&&) noexcept = default;
FprMeter::~FprMeter() = default;

void FprMeter::query(std::uint64_t count) {
  if (count == 0) return;
  const BulkOptions bulk{std::nullopt, workers_};
  const std::uint64_t chunk_keys = std::min(kChunkKeys, count);
  std::vector<std::uint64_t> chunk(chunk_keys);
  std::unique_ptr<bool[]> out(new bool[chunk_keys]);
  const std::uint64_t first = result_.queries;
  for (std::uint64_t done = 0; done < count; done += chunk_keys) {
    const std::uint64_t n = std::min(chunk_keys, count - done);
    for (std::uint64_t i = 0; i < n; ++i) {
      chunk[i] = stream_.query_key(first + done + i);
    }
    filter_->bulk_contains(std::span<const std::uint64_t>(chunk.data(), n),
                           std::span<bool>(out.get(), n), bulk);
    result_.positives +=
        static_cast<std::uint64_t>(std::count(out.get(), out.get() + n, true));
  }
  result_.queries += count;
  result_.fpr = static_cast<double>(result_.positives) /
                static_cast<double>(result_.queries);
}

FprResult FprMeter::result() const { return result_; }

const Filter& FprMeter::filter() const { return *filter_; }

FprResult measure_fpr(const FilterConfig& config, std::uint64_t query_count,
                      std::uint64_t key_seed, unsigned workers) {
  FprMeter meter(config, key_seed, workers);
  meter.query(query_count);
  return meter.result();
}

GridResult layout_grid_search(const FilterConfig& config, BenchOp op,
                              std::uint64_t key_count,
                              const ThroughputOptions& options) {
  const Geometry g = derive_geometry(config);
  const std::vector<Layout> layouts = enumerate_layouts(g.words_per_block);

  // Every layout must give the same answers on a mix of members and
  // non-members before any of them is timed.
  {
    FilterConfig probe_config = config;
    probe_config.layout.reset();
    Filter probe(probe_config);
    const std::uint64_t n = std::min<std::uint64_t>(key_count, 10'000);
    const auto members = generate_unique_keys(n, options.key_seed);
    probe.bulk_add(members);
    std::vector<std::uint64_t> queries = members;
    const auto fresh = generate_query_keys(n, options.key_seed);
    queries.insert(queries.end(), fresh.begin(), fresh.end());
    const auto expected = answers(probe, queries, layouts.front());
    for (const Layout& l : layouts) {
      if (answers(probe, queries, l) != expected) {
        throw BenchError("layout " + to_string(l) +
                         " changes query answers");
      }
    }
  }

  GridResult result;
  for (const Layout& l : layouts) {
    ThroughputOptions opts = options;
    opts.layout = l;
    result.rows.push_back(measure_throughput(config, op, key_count, opts));
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].throughput_eps > result.rows[result.best].throughput_eps) {
      result.best = i;
    }
  }
  return result;
}

double random_access_baseline(std::uint64_t bytes, AccessOp op,
                              std::uint64_t access_count, unsigned workers,
                              std::uint64_t seed) {
  const std::uint64_t n_words = std::max<std::uint64_t>(1, bytes / 8);
  if (access_count == 0) return 0.0;
  workers = std::max(1u, workers);
  std::vector<std::uint64_t> array;
  try {
    array.assign(n_words, 1);
  } catch (const std::bad_alloc&) {
    throw AllocationError("could not allocate a " + std::to_string(bytes) +
                          "-byte baseline array");
  }

  constexpr int kStreams = 8;
  std::atomic<std::uint64_t> sink{0};
  auto worker = [&](unsigned id, std::uint64_t accesses) {
    std::uint64_t state[kStreams];
    for (int s = 0; s < kStreams; ++s) {
      state[s] = splitmix64(seed ^ (std::uint64_t{id} << 32) ^ static_cast<std::uint64_t>(s));
    }
    std::uint64_t acc = 0;
    std::uint64_t* data = array.data();
    const bool shared = workers > 1;
    for (std::uint64_t i = 0; i < accesses; i += kStreams) {
      for (int s = 0; s < kStreams; ++s) {
        std::uint64_t x = state[s];
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        state[s] = x;
        const std::uint64_t idx = static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(x) * n_words) >> 64);
        if (op == AccessOp::kRead) {
          acc += data[idx];
        } else if (shared) {
          std::atomic_ref<std::uint64_t>(data[idx]).fetch_or(
              std::uint64_t{1} << (x & 63), std::memory_order_relaxed);
        } else {
          data[idx] |= std::uint64_t{1} << (x & 63);
        }
      }
    }
    sink.fetch_add(acc, std::memory_order_relaxed);
  };

  const std::uint64_t per_worker = (access_count + workers - 1) / workers;
  const double elapsed = timed([&] {
    std::vector<std::jthread> threads;
    for (unsigned w = 1; w < workers; ++w) threads.emplace_back(worker, w, per_worker);
    worker(0, per_worker);
  });
  const std::uint64_t performed =
      (per_worker + kStreams - 1) / kStreams * kStreams * workers;
  return static_cast<double>(performed) / elapsed;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const BenchReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
  };
  out << variant_name(r.variant) << ',' << r.m_bits << ',' << r.block_bits
      << ',' << r.word_bits << ',' << r.k << ',' << r.z << ','
      << r.layout.theta << ',' << r.layout.phi << ',' << op_name(r.op) << ','
      << r.workers << ',' << r.keys << ',' << fmt_double(r.elapsed_s) << ','
      << fmt_double(r.throughput_eps) << ',' << opt(r.fpr) << ','
      << opt(r.fill_ratio) << ',' << opt(r.sol_fraction) << '\n';
}

void write_json(std::ostream& out, const std::vector<BenchReport>& reports) {
  nlohmann::json records = nlohmann::json::array();
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  for (const BenchReport& r : reports) {
    records.push_back({
        {"variant", variant_name(r.variant)},
        {"m_bits", r.m_bits},
        {"B", r.block_bits},
        {"S", r.word_bits},
        {"k", r.k},
        {"z", r.z},
        {"theta", r.layout.theta},
        {"phi", r.layout.phi},
        {"op", op_name(r.op)},
        {"workers", r.workers},
        {"keys", r.keys},
        {"elapsed_s", r.elapsed_s},
        {"throughput_eps", r.throughput_eps},
        {"fpr", opt(r.fpr)},
        {"fill_ratio", opt(r.fill_ratio)},
        {"sol_fraction", opt(r.sol_fraction)},
    });
  }
  out << records.dump(2) << '\n';
}

std::vector<BenchReport> frontier_sweep(const FrontierSpec& spec,
                                        std::ostream& csv,
                                        std::ostream& errors) {
  std::vector<BenchReport> rows;
  write_csv_header(csv);
  csv.flush();

  for (std::uint64_t size : spec.sizes_bits) {
    std::optional<double> read_bound;
    std::optional<double> write_bound;
    try {
      read_bound = random_access_baseline(size / 8, AccessOp::kRead,
                                          spec.baseline_accesses,
                                          spec.throughput.workers);
      write_bound = random_access_baseline(size / 8, AccessOp::kWrite,
                                           spec.baseline_accesses,
                                           spec.throughput.workers);
    } catch (const std::exception& e) {
      errors << "baseline for " << size << " bits failed: " << e.what() << '\n';
    }

    std::vector<FilterConfig> cells;
    for (Variant v : spec.variants) {
      FilterConfig base;
      base.variant = v;
      base.m_bits = size;
      base.word_bits = spec.word_bits;
      base.k = spec.k;
      base.seed = spec.seed;
      if (v == Variant::kClassical) {
        base.block_bits = spec.word_bits;
        cells.push_back(base);
        continue;
      }
      for (std::uint64_t b : spec.block_bits) {
        FilterConfig c = base;
        c.block_bits = b;
        if (v == Variant::kRegisterBlocked) {
          if (b != spec.word_bits) continue;
          cells.push_back(c);
        } else if (v == Variant::kCacheSectorized) {
          const std::uint64_t s = b / spec.word_bits;
          for (std::uint32_t z = 2; z <= s; z *= 2) {
            c.z = z;
            cells.push_back(c);
          }
        } else {
          cells.push_back(c);
        }
      }
    }

    for (const FilterConfig& cell : cells) {
      try {
        if (auto err = validate_config(cell)) throw ConfigError(*err);
        const FprResult fpr = measure_fpr(cell, spec.fpr_queries, spec.seed,
                                          spec.throughput.workers);
        for (BenchOp op : {BenchOp::kAdd, BenchOp::kContains}) {
          GridResult grid = layout_grid_search(cell, op, spec.key_count, spec.throughput);
          BenchReport best = grid.rows[grid.best];
          best.fpr = fpr.fpr;
          best.fill_ratio = fpr.fill_ratio;
          const auto& bound = op == BenchOp::kAdd ? write_bound : read_bound;
          if (bound && *bound > 0) best.sol_fraction = best.throughput_eps / *bound;
          write_csv_row(csv, best);
          csv.flush();
          rows.push_back(best);
        }
      } catch (const std::exception& e) {
        errors << "cell " << variant_name(cell.variant) << " m=" << cell.m_bits
               << " B=" << cell.block_bits << " z=" << cell.z
               << " failed: " << e.what() << '\n';
      }
    }
  }
  return rows;
}

}  // namespace bloomvec
