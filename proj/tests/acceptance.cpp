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

// Acceptance checks. Run with --criterion N for one check, or with no
// arguments for all of them. Prints one PASS/FAIL line per criterion and
// exits nonzero if any failed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bloomvec/analytics.hpp"
#include "bloomvec/bench.hpp"
#include "bloomvec/filter.hpp"
#include "bloomvec/layout.hpp"
#include "bloomvec/oracle.hpp"

namespace {

using namespace bloomvec;

struct Outcome {
  bool pass = true;
  std::string detail;
};

constexpr std::uint64_t kFprBits = std::uint64_t{1} << 25;
constexpr std::uint64_t kFprSeed = 1;
constexpr std::uint64_t kFprQueries = 10'000'000;

FilterConfig make(Variant v, std::uint64_t m, std::uint64_t block, std::uint32_t k,
                  std::uint32_t z = 0, std::uint32_t word = 64) {
  FilterConfig c;
  c.variant = v;
  c.m_bits = m;
  c.block_bits = block;
  c.word_bits = word;
  c.k = k;
  c.z = z;
  c.seed = kFprSeed;
  return c;
}

std::string label(const FilterConfig& c) {
  std::ostringstream s;
  s << variant_name(c.variant);
  if (c.variant != Variant::kClassical) s << "(B=" << c.block_bits;
  if (c.variant == Variant::kCacheSectorized) s << ",z=" << c.z;
  if (c.variant != Variant::kClassical) s << ")";
  return s.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// The 200 configurations shared by criteria 1 and 2; variant i % 5.
std::vector<FilterConfig> acceptance_configs() {
  std::mt19937_64 rng(20260101);
  std::vector<FilterConfig> out;
  for (int i = 0; i < 200; ++i) {
    const auto want = static_cast<Variant>(i % 5);
    FilterConfig c;
    do {
      c = oracle::random_config(rng);
    } while (c.variant != want);
    out.push_back(c);
  }
  return out;
}

Outcome criterion_1() {
  std::uint64_t violations = 0;
  std::uint64_t checked = 0;
  std::array<int, 5> per_variant{};
  for (const FilterConfig& c : acceptance_configs()) {
    ++per_variant[static_cast<int>(c.variant)];
    const auto keys = generate_unique_keys(10'000, c.seed + 17);
    Filter f(c);
    f.bulk_add(keys);
    const auto bulk = f.bulk_contains(keys);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      violations += !bulk[i];
      violations += !f.contains(keys[i]);
      checked += 2;
    }
    Filter g(c);
    for (std::uint64_t key : keys) g.add(key);
    for (std::uint64_t key : keys) violations += !g.contains(key);
    checked += keys.size();
  }
  Outcome o;
  o.pass = violations == 0;
  std::ostringstream d;
  d << "200 configs (cbf/bbf/rbbf/sbf/csbf = " << per_variant[0] << "/" << per_variant[1]
    << "/" << per_variant[2] << "/" << per_variant[3] << "/" << per_variant[4]
    << "), " << checked << " member queries, " << violations << " false negatives";
  o.detail = d.str();
  return o;
}

Outcome criterion_2() {
  std::uint64_t layouts = 0;
  for (const FilterConfig& c : acceptance_configs()) {
    const auto members = generate_unique_keys(10'000, c.seed + 17);
    const auto others = generate_query_keys(10'000, c.seed + 17);
    if (auto failure = oracle::check_equivalence(c, members, others, 8)) {
      return {false, *failure};
    }
    layouts += enumerate_layouts(derive_geometry(c).words_per_block).size();
  }
  return {true, "200 configs, " + std::to_string(layouts) +
                    " (config, layout) pairs bit-identical to the scalar reference,"
                    " 1 and 8 workers"};
}

Outcome criterion_3() {
  const FilterConfig c = make(Variant::kClassical, kFprBits, 0, 16);
  const FprResult r = measure_fpr(c, kFprQueries, kFprSeed);
  const double p = std::pow(0.5, 16);
  const double mean = p * static_cast<double>(r.queries);
  const double sigma = std::sqrt(mean * (1 - p));
  const double lo = mean - 3 * sigma;
  const double hi = mean + 3 * sigma;
  const auto pos = static_cast<double>(r.positives);
  Outcome o;
  o.pass = pos >= lo && pos <= hi;
  o.detail = "n=" + std::to_string(r.inserted) + ", " + std::to_string(r.positives) +
             " positives in " + std::to_string(r.queries) + " queries (fpr " +
             sci(r.fpr) + "), band [" + sci(lo) + ", " + sci(hi) + "]";
  return o;
}

// Every variant at m = 2^25 in the configurations the other checks use.
std::vector<FilterConfig> fill_configs() {
  return {
      make(Variant::kClassical, kFprBits, 0, 16),
      make(Variant::kBlocked, kFprBits, 256, 16),
      make(Variant::kBlocked, kFprBits, 1024, 16),
      make(Variant::kRegisterBlocked, kFprBits, 64, 16),
      make(Variant::kSectorized, kFprBits, 256, 16),
      make(Variant::kSectorized, kFprBits, 1024, 16),
      make(Variant::kCacheSectorized, kFprBits, 1024, 16, 2),
      make(Variant::kCacheSectorized, kFprBits, 1024, 16, 4),
      make(Variant::kCacheSectorized, kFprBits, 1024, 16, 8),
      make(Variant::kCacheSectorized, kFprBits, 1024, 16, 16),
  };
}

Outcome criterion_4() {
  Outcome o;
  std::ostringstream d;
  for (const FilterConfig& c : fill_configs()) {
    const FprMeter meter(c, kFprSeed);
    const double fill = meter.result().fill_ratio;
    const bool ok = std::abs(fill - 0.5) <= 0.005;
    o.pass = o.pass && ok;
    d << label(c) << "=" << sci(fill) << (ok ? "" : "(out)") << " ";
  }
  o.detail = d.str() + "target 0.5 +/- 0.005";
  return o;
}

// Measured FPRs for criteria 5 and 6, computed once per process.
struct OrderingRun {
  FprResult rbbf, sbf256, sbf1024, cbf;
};

const OrderingRun& ordering_run() {
  static const OrderingRun run = [] {
    OrderingRun r;
    r.rbbf = measure_fpr(make(Variant::kRegisterBlocked, kFprBits, 64, 16), kFprQueries,
                         kFprSeed);
    r.sbf256 = measure_fpr(make(Variant::kSectorized, kFprBits, 256, 16), kFprQueries,
                           kFprSeed);
    r.sbf1024 = measure_fpr(make(Variant::kSectorized, kFprBits, 1024, 16), kFprQueries,
                            kFprSeed);
    r.cbf = measure_fpr(make(Variant::kClassical, kFprBits, 0, 16), kFprQueries, kFprSeed);
    return r;
  }();
  return run;
}

// Decides whether FPR(a) > FPR(b) by querying both filters with the same
// key stream, doubling the query count until the difference in positives
// exceeds three standard deviations or the budget runs out.
struct PairDecision {
  bool greater = false;
  bool resolved = false;
  double fpr_a = 0;
  double fpr_b = 0;
  std::uint64_t queries = 0;
};

PairDecision decide_greater(FprMeter& a, FprMeter& b, std::uint64_t budget) {
  std::uint64_t step = kFprQueries;
  PairDecision d;
  while (true) {
    const std::uint64_t target = std::min(budget, a.result().queries + step);
    a.query(target - a.result().queries);
    b.query(target - b.result().queries);
    const auto ra = a.result();
    const auto rb = b.result();
    const double diff = static_cast<double>(ra.positives) - static_cast<double>(rb.positives);
    const double sigma = std::sqrt(static_cast<double>(ra.positives + rb.positives));
    d.fpr_a = ra.fpr;
    d.fpr_b = rb.fpr;
    d.queries = ra.queries;
    if (std::abs(diff) > 3 * sigma || ra.queries >= budget) {
      d.resolved = std::abs(diff) > 3 * sigma;
      d.greater = diff > 0;
      return d;
    }
    step = ra.queries;
  }
}

Outcome criterion_5() {
  const OrderingRun& r = ordering_run();
  Outcome o;
  std::ostringstream d;
  const std::pair<const char*, const FprResult*> chain[] = {
      {"rbbf(B=64)", &r.rbbf},
      {"sbf(B=256)", &r.sbf256},
      {"sbf(B=1024)", &r.sbf1024},
      {"cbf", &r.cbf}};
  for (std::size_t i = 0; i < 4; ++i) {
    d << chain[i].first << "=" << sci(chain[i].second->fpr);
    if (i + 1 < 4) {
      const double ratio = chain[i].second->fpr / chain[i + 1].second->fpr;
      const bool ok = ratio >= 2;
      o.pass = o.pass && ok;
      d << " >[" << sci(ratio) << "x" << (ok ? "" : " < 2x") << "] ";
    }
  }

  constexpr std::uint64_t kBudget = std::uint64_t{1} << 31;
  d << "; csbf(B=1024) z-chain:";
  std::vector<FprMeter> meters;
  for (std::uint32_t z = 2; z <= 16; z *= 2) {
    meters.emplace_back(make(Variant::kCacheSectorized, kFprBits, 1024, 16, z), kFprSeed);
  }
  for (std::size_t i = 0; i + 1 < meters.size(); ++i) {
    const PairDecision pd = decide_greater(meters[i], meters[i + 1], kBudget);
    const bool ok = pd.greater && pd.resolved;
    o.pass = o.pass && ok;
    d << " z=" << (2u << i) << ":" << sci(pd.fpr_a) << " > z=" << (4u << i) << ":"
      << sci(pd.fpr_b) << " (" << pd.queries << " queries"
      << (pd.resolved ? "" : ", unresolved") << (ok ? "" : ", FAIL") << ")";
  }
  o.detail = d.str();
  return o;
}

Outcome criterion_6() {
  const OrderingRun& r = ordering_run();
  const double ratio = r.sbf256.fpr / r.cbf.fpr;
  Outcome o;
  o.pass = ratio >= 20 && ratio <= 500;
  o.detail = "fpr sbf(B=256)=" + sci(r.sbf256.fpr) + " / cbf=" + sci(r.cbf.fpr) +
             " = " + sci(ratio) + ", band [20, 500]";
  return o;
}

Outcome criterion_7() {
  Outcome o;
  std::ostringstream d;
  int k_checks = 0;
  for (double c = 1; c <= 40; c += 0.01) {
    const std::uint32_t k = optimal_k(c).integer;
    const double f = fpr_estimate(c, 1, k);
    const bool ok = f <= fpr_estimate(c, 1, k + 1) && (k == 1 || f <= fpr_estimate(c, 1, k - 1));
    if (!ok) {
      o.pass = false;
      d << "optimal_k(" << c << ")=" << k << " is not a local minimum; ";
    }
    ++k_checks;
  }
  double worst_min = 0;
  for (double c = 1; c <= 40; c += 0.01) {
    // Evaluated directly: the exact optimum drops below one hash for c < 1.45.
    const double k = optimal_k(c).exact;
    const double eq = std::pow(-std::expm1(-k / c), k);
    worst_min = std::max(worst_min, std::abs(min_fpr(c) - eq) / eq);
  }
  double worst_cap = 0;
  for (double f = 1e-9; f < 0.6; f *= 1.1) {
    const SizingResult s = capacity_for_fpr(std::uint64_t{1} << 30, f);
    worst_cap = std::max(worst_cap, std::abs(min_fpr(s.c) - f) / f);
  }
  o.pass = o.pass && worst_min <= 1e-9 && worst_cap <= 1e-12;
  d << k_checks << " optimal_k checks; min_fpr max rel err " << sci(worst_min)
    << " (<= 1e-9); capacity round trip max rel err " << sci(worst_cap) << " (<= 1e-12)";
  o.detail = d.str();
  return o;
}

Outcome criterion_8() {
  Outcome o;
  std::ostringstream d;
  const auto s8 = enumerate_layouts(8);
  if (s8.size() != 10) {
    o.pass = false;
    d << "enumerate_layouts(8) returned " << s8.size() << "; ";
  }
  std::uint64_t pairs = 0;
  for (std::uint32_t s = 1; s <= 64; s *= 2) {
    for (const Layout& l : enumerate_layouts(s)) {
      std::vector<int> hits(s, 0);
      for (std::uint32_t step = 0; step < layout_steps(l, s); ++step) {
        for (std::uint32_t lane = 0; lane < l.theta; ++lane) {
          for (std::uint32_t w : word_assignment(l, s, lane, step)) ++hits[w];
        }
      }
      if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) {
        o.pass = false;
        d << "layout " << to_string(l) << " s=" << s << " is not a partition; ";
      }
      ++pairs;
    }
  }
  // The five depicted layouts at s = 8: (lane, step) -> words.
  struct Depicted {
    Layout layout;
    std::uint32_t lane, step;
    std::vector<std::uint32_t> words;
  };
  const Depicted depicted[] = {
      {{1, 8}, 0, 0, {0, 1, 2, 3, 4, 5, 6, 7}},
      {{1, 1}, 0, 5, {5}},
      {{2, 2}, 1, 0, {2, 3}},
      {{2, 4}, 1, 0, {4, 5, 6, 7}},
      {{4, 2}, 3, 0, {6, 7}},
  };
  for (const Depicted& p : depicted) {
    if (word_assignment(p.layout, 8, p.lane, p.step) != p.words) {
      o.pass = false;
      d << "layout " << to_string(p.layout) << " word order differs; ";
    }
  }
  d << "enumerate_layouts(8)=" << s8.size() << ", " << pairs
    << " (layout, s) partitions checked, 5 depicted word orders checked";
  o.detail = d.str();
  return o;
}

Outcome criterion_9() {
  constexpr std::uint64_t kBits = std::uint64_t{8} << 30;  // 1 GiB
  constexpr std::uint64_t kKeys = 10'000'000;
  ThroughputOptions opts;
  opts.max_repetitions = 5;
  const BenchReport sbf =
      measure_throughput(make(Variant::kSectorized, kBits, 256, 16), BenchOp::kContains,
                         kKeys, opts);
  const BenchReport cbf =
      measure_throughput(make(Variant::kClassical, kBits, 0, 16), BenchOp::kContains,
                         kKeys, opts);
  const double baseline = random_access_baseline(kBits / 8, AccessOp::kRead, 20'000'000);
  const double ratio = sbf.throughput_eps / cbf.throughput_eps;
  Outcome o;
  o.pass = ratio >= 2;
  o.detail = "1 GiB, 1 worker: sbf(B=256) " + sci(sbf.throughput_eps) + " keys/s (" +
             sci(sbf.throughput_eps / baseline) + " of random read), cbf " +
             sci(cbf.throughput_eps) + " keys/s (" + sci(cbf.throughput_eps / baseline) +
             " of random read), random read " + sci(baseline) + "/s, ratio " +
             sci(ratio) + " (>= 2)";
  return o;
}

Outcome criterion_10() {
  Outcome o;
  std::ostringstream d;
  const auto members = generate_unique_keys(100'000, 10);
  const auto others = generate_query_keys(100'000, 10);
  int configs = 0;
  for (const FilterConfig& c : {make(Variant::kClassical, 1 << 22, 0, 16),
                                make(Variant::kBlocked, 1 << 22, 512, 16, 0, 32),
                                make(Variant::kRegisterBlocked, 1 << 22, 64, 8),
                                make(Variant::kSectorized, 1 << 22, 256, 16),
                                make(Variant::kCacheSectorized, 1 << 22, 1024, 16, 4)}) {
    Filter built(c);
    built.bulk_add(members);
    const auto bytes = built.serialize();
    const Filter loaded = Filter::deserialize(bytes);
    if (built.bulk_contains(members) != loaded.bulk_contains(members) ||
        built.bulk_contains(others) != loaded.bulk_contains(others)) {
      o.pass = false;
      d << label(c) << " answers changed after round trip; ";
    }
    for (const Layout& l : enumerate_layouts(built.geometry().words_per_block)) {
      Filter other(c);
      other.bulk_add(members, {l, 8});
      if (other.serialize() != bytes) {
        o.pass = false;
        d << label(c) << " bytes differ under " << to_string(l) << "; ";
      }
    }
    ++configs;
  }
  d << configs << " variants, 10^5 members and 10^5 non-members per round trip,"
    << " serialized bytes compared across every layout";
  o.detail = d.str();
  return o;
}

const std::function<Outcome()> kCriteria[] = {
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
};

bool run_one(int n) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = kCriteria[n - 1]();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("criterion %d: %s (%.1fs) %s\n", n, o.pass ? "PASS" : "FAIL", secs,
              o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (n < 1 || n > 10) {
        std::fprintf(stderr, "criterion must be 1..10\n");
        return 2;
      }
      selected.push_back(n);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (int n = 1; n <= 10; ++n) selected.push_back(n);
  }
  bool ok = true;
  for (int n : selected) ok = run_one(n) && ok;
  return ok ? 0 : 1;
}
