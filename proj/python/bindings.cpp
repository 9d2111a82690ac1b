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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "bloomvec/analytics.hpp"
#include "bloomvec/bench.hpp"
#include "bloomvec/filter.hpp"
#include "bloomvec/layout.hpp"

namespace py = pybind11;
using namespace bloomvec;

namespace {

using KeyArray = py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>;

std::span<const std::uint64_t> key_span(const KeyArray& keys) {
  if (keys.ndim() != 1) throw std::invalid_argument("keys must be a 1-d array");
  return {keys.data(), static_cast<std::size_t>(keys.size())};
}

BulkOptions bulk_options(std::optional<Layout> layout, unsigned workers) {
  return BulkOptions{layout, workers};
}

py::array_t<std::uint64_t> to_array(std::vector<std::uint64_t> v) {
  py::array_t<std::uint64_t> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(std::uint64_t));
  return out;
}

std::span<const std::byte> as_bytes_view(const py::bytes& b, std::string& holder) {
  holder = b;
  return std::as_bytes(std::span<const char>(holder.data(), holder.size()));
}

}  // namespace

PYBIND11_MODULE(_bloomvec, m) {
  m.doc() = "Blocked and sectorized Bloom filters";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SerializationError>(m, "SerializationError", PyExc_ValueError);

  py::enum_<Variant>(m, "Variant")
      .value("CBF", Variant::kClassical)
      .value("BBF", Variant::kBlocked)
      .value("RBBF", Variant::kRegisterBlocked)
      .value("SBF", Variant::kSectorized)
      .value("CSBF", Variant::kCacheSectorized);

  py::class_<Layout>(m, "Layout")
      .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("theta") = 1,
           py::arg("phi") = 1)
      .def_readwrite("theta", &Layout::theta)
      .def_readwrite("phi", &Layout::phi)
      .def("__eq__", [](const Layout& a, const Layout& b) { return a == b; })
      .def("__hash__", [](const Layout& l) { return l.theta * 131 + l.phi; })
      .def("__repr__", [](const Layout& l) { return "Layout" + to_string(l); });

  py::class_<FilterConfig>(m, "FilterConfig")
      .def(py::init([](Variant variant, std::uint64_t m_bits, std::uint64_t block_bits,
                       std::uint32_t word_bits, std::uint32_t k, std::uint32_t z,
                       std::uint64_t seed, std::optional<Layout> layout) {
             FilterConfig c;
             c.variant = variant;
             c.m_bits = m_bits;
             c.block_bits = block_bits;
             c.word_bits = word_bits;
             c.k = k;
             c.z = z;
             c.seed = seed;
             c.layout = layout;
             return c;
           }),
           py::arg("variant") = Variant::kSectorized, py::arg("m_bits") = 1 << 20,
           py::arg("block_bits") = 256, py::arg("word_bits") = 64, py::arg("k") = 16,
           py::arg("z") = 0, py::arg("seed") = 0, py::arg("layout") = py::none())
      .def_readwrite("variant", &FilterConfig::variant)
      .def_readwrite("m_bits", &FilterConfig::m_bits)
      .def_readwrite("block_bits", &FilterConfig::block_bits)
      .def_readwrite("word_bits", &FilterConfig::word_bits)
      .def_readwrite("k", &FilterConfig::k)
      .def_readwrite("z", &FilterConfig::z)
      .def_readwrite("seed", &FilterConfig::seed)
      .def_readwrite("layout", &FilterConfig::layout)
      .def("validate", [](const FilterConfig& c) { return validate_config(c); });

  py::class_<Filter>(m, "Filter")
      .def(py::init<FilterConfig>(), py::arg("config"))
      .def_property_readonly("config", &Filter::config)
      .def_property_readonly("m_effective",
                             [](const Filter& f) { return f.geometry().m_effective; })
      .def_property_readonly("words_per_block",
                             [](const Filter& f) { return f.geometry().words_per_block; })
      .def_property_readonly("word_count", &Filter::word_count)
      .def("add", py::overload_cast<std::uint64_t>(&Filter::add), py::arg("key"))
      .def("add_bytes",
           [](Filter& f, const py::bytes& key) {
             std::string holder;
             f.add(as_bytes_view(key, holder));
           },
           py::arg("key"))
      .def("contains", py::overload_cast<std::uint64_t>(&Filter::contains, py::const_),
           py::arg("key"))
      .def("contains_bytes",
           [](const Filter& f, const py::bytes& key) {
             std::string holder;
             return f.contains(as_bytes_view(key, holder));
           },
           py::arg("key"))
      .def("__contains__", py::overload_cast<std::uint64_t>(&Filter::contains, py::const_))
      .def("bulk_add",
           [](Filter& f, const KeyArray& keys, std::optional<Layout> layout,
              unsigned workers) {
             const auto span = key_span(keys);
             py::gil_scoped_release release;
             f.bulk_add(span, bulk_options(layout, workers));
           },
           py::arg("keys"), py::arg("layout") = py::none(), py::arg("workers") = 1)
      .def("bulk_contains",
           [](const Filter& f, const KeyArray& keys, std::optional<Layout> layout,
              unsigned workers) {
             const auto span = key_span(keys);
             py::array_t<bool> out(static_cast<py::ssize_t>(span.size()));
             std::span<bool> dst(out.mutable_data(), span.size());
             {
               py::gil_scoped_release release;
               f.bulk_contains(span, dst, bulk_options(layout, workers));
             }
             return out;
           },
           py::arg("keys"), py::arg("layout") = py::none(), py::arg("workers") = 1)
      .def("popcount", &Filter::popcount)
      .def("fill_ratio", &Filter::fill_ratio)
      .def("clear", &Filter::clear)
      .def("same_contents", &Filter::same_contents)
      .def("words",
           [](const Filter& f) {
             std::vector<std::uint64_t> w(f.word_count());
             for (std::uint64_t i = 0; i < w.size(); ++i) w[i] = f.word(i);
             return to_array(std::move(w));
           })
      .def("serialize",
           [](const Filter& f) {
             const auto bytes = f.serialize();
             return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
           })
      .def_static("deserialize",
                  [](const py::bytes& data) {
                    std::string holder;
                    return Filter::deserialize(as_bytes_view(data, holder));
                  },
                  py::arg("data"));

  m.def("fpr_estimate", &fpr_estimate, py::arg("m_bits"), py::arg("n"), py::arg("k"));
  m.def("optimal_k",
        [](double c) {
          const OptimalK k = optimal_k(c);
          return py::make_tuple(k.exact, k.integer);
        },
        py::arg("bits_per_element"));
  m.def("min_fpr", &min_fpr, py::arg("bits_per_element"));
  m.def("optimal_n", &optimal_n, py::arg("m_effective"), py::arg("k"));
  m.def("capacity_for_fpr",
        [](std::uint64_t m_effective, double target) {
          const SizingResult r = capacity_for_fpr(m_effective, target);
          py::dict d;
          d["c"] = r.c;
          d["k_opt"] = r.k_opt;
          d["f_predicted"] = r.f_predicted;
          d["n_opt"] = r.n_opt;
          return d;
        },
        py::arg("m_effective"), py::arg("target_fpr"));

  m.def("enumerate_layouts", &enumerate_layouts, py::arg("s"));
  m.def("word_assignment", &word_assignment, py::arg("layout"), py::arg("s"),
        py::arg("lane"), py::arg("step"));

  m.def("generate_unique_keys",
        [](std::uint64_t count, std::uint64_t seed) {
          return to_array(generate_unique_keys(count, seed));
        },
        py::arg("count"), py::arg("seed"));
  m.def("generate_query_keys",
        [](std::uint64_t count, std::uint64_t seed) {
          return to_array(generate_query_keys(count, seed));
        },
        py::arg("count"), py::arg("seed"));
  m.def("measure_fpr",
        [](const FilterConfig& config, std::uint64_t queries, std::uint64_t key_seed,
           unsigned workers) {
          FprResult r;
          {
            py::gil_scoped_release release;
            r = measure_fpr(config, queries, key_seed, workers);
          }
          py::dict d;
          d["fpr"] = r.fpr;
          d["fill_ratio"] = r.fill_ratio;
          d["inserted"] = r.inserted;
          d["queries"] = r.queries;
          d["positives"] = r.positives;
          return d;
        },
        py::arg("config"), py::arg("queries"), py::arg("key_seed") = 1,
        py::arg("workers") = 1);
}
