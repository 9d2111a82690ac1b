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

#include "bloomvec/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bloomvec/analytics.hpp"
#include "bloomvec/bench.hpp"
#include "bloomvec/config.hpp"
#include "bloomvec/filter.hpp"
#include "bloomvec/oracle.hpp"

namespace bloomvec::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t size_flag(const std::string& flag, const std::string& value) {
  auto bits = parse_size_bits(value);
  if (!bits || *bits == 0) {
    throw UsageError("--" + flag + ": cannot parse size '" + value + "'");
  }
  return *bits;
}

Variant variant_flag(const std::string& flag, const std::string& value) {
  auto v = parse_variant(value);
  if (!v) {
    throw UsageError("--" + flag + ": unknown variant '" + value +
                     "' (expected cbf, bbf, rbbf, sbf or csbf)");
  }
  return *v;
}

// Filter parameters shared by fpr, bench, grid and build.
struct ConfigFlags {
  std::string variant = "sbf";
  std::string m = "32mb";
  std::optional<std::uint64_t> block;
  std::uint32_t word = 64;
  std::uint32_t k = 16;
  std::uint32_t z = 0;
  std::uint64_t seed = 1;
  std::optional<std::uint32_t> theta;
  std::optional<std::uint32_t> phi;

  void attach(CLI::App* app, bool with_layout) {
    app->add_option("--variant", variant, "cbf, bbf, rbbf, sbf or csbf")
        ->capture_default_str();
    app->add_option("--m", m, "Filter size: bits, or 32mb / 1gb")
        ->capture_default_str();
    app->add_option("--block", block, "Block size B in bits (default: 256, rbbf: S)");
    app->add_option("--word", word, "Word size S in bits (32 or 64)")
        ->capture_default_str();
    app->add_option("--k", k, "Bits per key")->capture_default_str();
    app->add_option("--z", z, "Group count (csbf only)")->capture_default_str();
    app->add_option("--seed", seed, "Hash seed")->capture_default_str();
    if (with_layout) {
      app->add_option("--theta", theta, "Lanes per key (default: per-op)");
      app->add_option("--phi", phi, "Words per lane per step (default: per-op)");
    }
  }

  FilterConfig build() const {
    FilterConfig c;
    c.variant = variant_flag("variant", variant);
    c.m_bits = size_flag("m", m);
    c.block_bits = block.value_or(c.variant == Variant::kRegisterBlocked ? word : 256);
    c.word_bits = word;
    c.k = k;
    c.z = z;
    c.seed = seed;
    if (theta || phi) c.layout = Layout{theta.value_or(1), phi.value_or(1)};
    if (auto e = validate_config(c)) throw UsageError("invalid filter configuration: " + *e);
    return c;
  }
};

std::vector<std::uint64_t> read_keys(const std::string& path, bool text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open key file '" + path + "'");
  std::vector<std::uint64_t> keys;
  if (text) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      auto last = line.find_last_not_of(" \t\r");
      std::uint64_t v = 0;
      const char* b = line.data() + first;
      const char* e = line.data() + last + 1;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) {
        throw RuntimeFailure("key file '" + path + "' line " +
                             std::to_string(line_no) + ": not a decimal key");
      }
      keys.push_back(v);
    }
    return keys;
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) {
    throw RuntimeFailure("key file '" + path + "' has " +
                         std::to_string(bytes.size()) +
                         " bytes, not a multiple of 8");
  }
  keys.resize(bytes.size() / 8);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= std::uint64_t{static_cast<unsigned char>(bytes[i * 8 + b])} << (8 * b);
    }
    keys[i] = v;
  }
  return keys;
}

std::vector<std::byte> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open filter file '" + path + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(),
                 [](char c) { return static_cast<std::byte>(c); });
  return out;
}

void write_file(const std::string& path, std::span<const std::byte> data) {
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) throw RuntimeFailure("cannot write '" + path + "'");
  outf.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size()));
  if (!outf) throw RuntimeFailure("write to '" + path + "' failed");
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::optional<std::uint64_t> parse_size_bits(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::uint64_t multiplier = 1;
  for (auto [suffix, bytes] :
       {std::pair<std::string_view, std::uint64_t>{"kb", 1ull << 10},
        {"mb", 1ull << 20},
        {"gb", 1ull << 30}}) {
    if (lower.size() > suffix.size() &&
        lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0) {
      multiplier = bytes * 8;
      lower.resize(lower.size() - suffix.size());
      break;
    }
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), value);
  if (ec != std::errc() || ptr != lower.data() + lower.size() || lower.empty()) {
    return std::nullopt;
  }
  if (value > UINT64_MAX / multiplier) return std::nullopt;
  return value * multiplier;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"bloomvec: blocked and sectorized Bloom filters"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Closed-form FPR, optimal k and minimum FPR");
  std::string an_m;
  std::uint64_t an_n = 0;
  std::optional<std::uint32_t> an_k;
  analyze->add_option("--m", an_m, "Filter size: bits, or 32mb / 1gb")->required();
  analyze->add_option("--n", an_n, "Inserted elements")->required();
  analyze->add_option("--k", an_k, "Bits per key (default: optimal)");

  // fpr
  auto* fpr = app.add_subcommand("fpr", "Measure the false-positive rate at optimal load");
  ConfigFlags fpr_cfg;
  fpr_cfg.attach(fpr, false);
  std::uint64_t fpr_queries = 10'000'000;
  unsigned fpr_workers = 1;
  fpr->add_option("--queries", fpr_queries, "Non-member queries")->capture_default_str();
  fpr->add_option("--workers", fpr_workers, "Worker threads")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Time bulk add or contains");
  ConfigFlags bench_cfg;
  bench_cfg.attach(bench, true);
  std::string bench_op = "contains";
  std::uint64_t bench_keys = 10'000'000;
  unsigned bench_workers = 1;
  std::uint32_t bench_reps = 20;
  bool bench_json = false;
  bench->add_option("--op", bench_op, "add or contains")->capture_default_str();
  bench->add_option("--keys", bench_keys, "Keys per repetition")->capture_default_str();
  bench->add_option("--workers", bench_workers, "Worker threads")->capture_default_str();
  bench->add_option("--reps", bench_reps, "Maximum repetitions")->capture_default_str();
  bench->add_flag("--json", bench_json, "Emit JSON instead of CSV");

  // grid
  auto* grid = app.add_subcommand("grid", "Benchmark every valid layout");
  ConfigFlags grid_cfg;
  grid_cfg.attach(grid, false);
  std::string grid_op = "contains";
  std::uint64_t grid_keys = 10'000'000;
  unsigned grid_workers = 1;
  std::uint32_t grid_reps = 20;
  grid->add_option("--op", grid_op, "add or contains")->capture_default_str();
  grid->add_option("--keys", grid_keys, "Keys per repetition")->capture_default_str();
  grid->add_option("--workers", grid_workers, "Worker threads")->capture_default_str();
  grid->add_option("--reps", grid_reps, "Maximum repetitions")->capture_default_str();

  // frontier
  auto* frontier = app.add_subcommand("frontier", "Throughput vs FPR sweep to CSV");
  std::string fr_variants = "rbbf,sbf,csbf,bbf,cbf";
  std::string fr_blocks = "64,128,256,512,1024";
  std::string fr_sizes = "32mb,1gb";
  std::string fr_out;
  std::uint32_t fr_word = 64;
  std::uint32_t fr_k = 16;
  std::uint64_t fr_seed = 1;
  std::uint64_t fr_keys = 10'000'000;
  std::uint64_t fr_queries = 10'000'000;
  unsigned fr_workers = 1;
  std::uint32_t fr_reps = 20;
  bool fr_json = false;
  frontier->add_option("--variants", fr_variants, "Comma-separated variants")->capture_default_str();
  frontier->add_option("--blocks", fr_blocks, "Comma-separated block sizes (bits)")->capture_default_str();
  frontier->add_option("--sizes", fr_sizes, "Comma-separated filter sizes")->capture_default_str();
  frontier->add_option("--out", fr_out, "Output CSV path")->required();
  frontier->add_option("--word", fr_word, "Word size S")->capture_default_str();
  frontier->add_option("--k", fr_k, "Bits per key")->capture_default_str();
  frontier->add_option("--seed", fr_seed, "Hash and key seed")->capture_default_str();
  frontier->add_option("--keys", fr_keys, "Keys per throughput run")->capture_default_str();
  frontier->add_option("--queries", fr_queries, "FPR queries per cell")->capture_default_str();
  frontier->add_option("--workers", fr_workers, "Worker threads")->capture_default_str();
  frontier->add_option("--reps", fr_reps, "Maximum repetitions")->capture_default_str();
  frontier->add_flag("--json", fr_json, "Also write <out>.json");

  // build
  auto* build = app.add_subcommand("build", "Build a filter from a key file");
  ConfigFlags build_cfg;
  build_cfg.attach(build, false);
  std::string build_keys;
  std::string build_out;
  bool build_text = false;
  unsigned build_workers = 1;
  build->add_option("--keys-file", build_keys, "Keys: raw little-endian u64")->required();
  build->add_option("--out", build_out, "Serialized filter path")->required();
  build->add_flag("--text", build_text, "Key file holds one decimal per line");
  build->add_option("--workers", build_workers, "Worker threads")->capture_default_str();

  // query
  auto* query = app.add_subcommand("query", "Query a serialized filter");
  std::string query_filter;
  std::string query_keys;
  bool query_text = false;
  query->add_option("--filter", query_filter, "Serialized filter path")->required();
  query->add_option("--keys-file", query_keys, "Keys: raw little-endian u64")->required();
  query->add_flag("--text", query_text, "Key file holds one decimal per line");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Reference-equivalence and invariant checks");
  oracle::SelftestOptions st_opts;
  selftest->add_option("--configs", st_opts.configs, "Random configurations")->capture_default_str();
  selftest->add_option("--keys", st_opts.keys, "Keys per configuration")->capture_default_str();
  selftest->add_option("--seed", st_opts.seed, "Seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  auto parse_op_flag = [](const std::string& v) {
    auto op = parse_op(v);
    if (!op) throw UsageError("--op: expected add or contains, got '" + v + "'");
    return *op;
  };

  try {
    if (*analyze) {
      const std::uint64_t m = size_flag("m", an_m);
      if (an_n == 0) throw UsageError("--n: must be at least 1");
      const double c = static_cast<double>(m) / static_cast<double>(an_n);
      const OptimalK ko = optimal_k(c);
      const std::uint32_t k = an_k.value_or(ko.integer);
      if (k == 0) throw UsageError("--k: must be at least 1");
      out << "m_bits=" << m << '\n'
          << "n=" << an_n << '\n'
          << "c=" << sci(c) << '\n'
          << "k=" << k << '\n'
          << "fpr_predicted=" << sci(fpr_estimate(static_cast<double>(m),
                                                  static_cast<double>(an_n), k))
          << '\n'
          << "k_opt_exact=" << sci(ko.exact) << '\n'
          << "k_opt=" << ko.integer << '\n'
          << "f_min=" << sci(min_fpr(c)) << '\n'
          << "n_opt=" << optimal_n(m, k) << '\n';
      return kOk;
    }
    if (*fpr) {
      const FilterConfig config = fpr_cfg.build();
      const FprResult r = measure_fpr(config, fpr_queries, config.seed, fpr_workers);
      const Geometry g = derive_geometry(config);
      out << "variant=" << variant_name(config.variant) << '\n'
          << "m_effective=" << g.m_effective << '\n'
          << "inserted=" << r.inserted << '\n'
          << "queries=" << r.queries << '\n'
          << "positives=" << r.positives << '\n'
          << "fpr=" << sci(r.fpr) << '\n'
          << "fpr_classical_bound="
          << sci(fpr_estimate(static_cast<double>(g.m_effective),
                              static_cast<double>(r.inserted), config.k))
          << '\n'
          << "fill_ratio=" << sci(r.fill_ratio) << '\n';
      return kOk;
    }
    if (*bench) {
      const FilterConfig config = bench_cfg.build();
      const BenchOp op = parse_op_flag(bench_op);
      ThroughputOptions opts;
      opts.workers = bench_workers;
      opts.layout = config.layout;
      opts.max_repetitions = bench_reps;
      const BenchReport r = measure_throughput(config, op, bench_keys, opts);
      if (bench_json) {
        write_json(out, {r});
      } else {
        write_csv_header(out);
        write_csv_row(out, r);
      }
      return kOk;
    }
    if (*grid) {
      const FilterConfig config = grid_cfg.build();
      const BenchOp op = parse_op_flag(grid_op);
      ThroughputOptions opts;
      opts.workers = grid_workers;
      opts.max_repetitions = grid_reps;
      const GridResult g = layout_grid_search(config, op, grid_keys, opts);
      out << kCsvHeader << ",best\n";
      for (std::size_t i = 0; i < g.rows.size(); ++i) {
        std::ostringstream row;
        write_csv_row(row, g.rows[i]);
        std::string line = row.str();
        line.pop_back();
        out << line << ',' << (i == g.best ? 1 : 0) << '\n';
      }
      return kOk;
    }
    if (*frontier) {
      FrontierSpec spec;
      for (const auto& v : split_list(fr_variants)) {
        spec.variants.push_back(variant_flag("variants", v));
      }
      for (const auto& b : split_list(fr_blocks)) {
        auto bits = parse_size_bits(b);
        if (!bits || *bits == 0) throw UsageError("--blocks: cannot parse '" + b + "'");
        spec.block_bits.push_back(*bits);
      }
      for (const auto& s : split_list(fr_sizes)) spec.sizes_bits.push_back(size_flag("sizes", s));
      if (spec.variants.empty() || spec.sizes_bits.empty()) {
        throw UsageError("--variants and --sizes must be non-empty");
      }
      spec.word_bits = fr_word;
      spec.k = fr_k;
      spec.seed = fr_seed;
      spec.key_count = fr_keys;
      spec.fpr_queries = fr_queries;
      spec.throughput.workers = fr_workers;
      spec.throughput.max_repetitions = fr_reps;
      std::ofstream csv(fr_out, std::ios::trunc);
      if (!csv) throw RuntimeFailure("cannot write '" + fr_out + "'");
      const auto rows = frontier_sweep(spec, csv, err);
      if (fr_json) {
        std::ofstream json(fr_out + ".json", std::ios::trunc);
        if (!json) throw RuntimeFailure("cannot write '" + fr_out + ".json'");
        write_json(json, rows);
      }
      out << "wrote " << rows.size() << " rows to " << fr_out << '\n';
      return kOk;
    }
    if (*build) {
      const FilterConfig config = build_cfg.build();
      const auto keys = read_keys(build_keys, build_text);
      Filter filter(config);
      filter.bulk_add(keys, BulkOptions{std::nullopt, std::max(1u, build_workers)});
      write_file(build_out, filter.serialize());
      out << "inserted=" << keys.size() << '\n'
          << "fill_ratio=" << sci(filter.fill_ratio()) << '\n';
      return kOk;
    }
    if (*query) {
      const auto bytes = read_file(query_filter);
      const Filter filter = Filter::deserialize(bytes);
      const auto keys = read_keys(query_keys, query_text);
      const auto answers = filter.bulk_contains(keys);
      std::string buffer;
      buffer.reserve(answers.size() * 2);
      for (std::uint8_t a : answers) {
        buffer.push_back(a ? '1' : '0');
        buffer.push_back('\n');
      }
      out << buffer;
      return kOk;
    }
    if (*selftest) {
      return oracle::run_selftest(out, st_opts) ? kOk : kCheckFailed;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SerializationError& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace bloomvec::cli
