# Copyright 2026 The bloomvec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Blocked and sectorized Bloom filters with bulk, layout-parameterized kernels."""

from bloomvec._bloomvec import (
    ConfigError,
    Filter,
    FilterConfig,
    Layout,
    SerializationError,
    Variant,
    capacity_for_fpr,
    enumerate_layouts,
    fpr_estimate,
    generate_query_keys,
    generate_unique_keys,
    measure_fpr,
    min_fpr,
    optimal_k,
    optimal_n,
    word_assignment,
)

__all__ = [
    "ConfigError",
    "Filter",
    "FilterConfig",
    "Layout",
    "SerializationError",
    "Variant",
    "capacity_for_fpr",
    "enumerate_layouts",
    "fpr_estimate",
    "generate_query_keys",
    "generate_unique_keys",
    "measure_fpr",
    "min_fpr",
    "optimal_k",
    "optimal_n",
    "word_assignment",
]
