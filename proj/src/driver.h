// Copyright 2026 The Tilewright Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Report-producing operations behind the command-line tool. Each takes the
// user's --bind values and returns a JSON report.

#ifndef TILEWRIGHT_SRC_DRIVER_H_
#define TILEWRIGHT_SRC_DRIVER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "catalog.h"
#include "tileir.h"

namespace tw {

// Bindings split into catalog problem dims and spec symbols. Throws
// Error(kInvalidArgument) for names that are neither, and for values < 1.
struct SplitBindings {
  Binding dims;
  Binding symbols;
};
SplitBindings SplitUserBindings(const CompiledKernel& kernel,
                                const CatalogEntry* entry, const Binding& bind);

// Symbol values implied by the bindings: explicit symbols, sizes and
// contiguous strides from problem dims, and derived meta-parameters.
Binding ImpliedSymbols(const CompiledKernel& kernel, const CatalogEntry* entry,
                       const SplitBindings& split);

nlohmann::ordered_json InspectReport(const CompiledKernel& kernel,
                                     const CatalogEntry* entry,
                                     const Binding& bind);

nlohmann::ordered_json VerifyReport(const CompiledKernel& kernel,
                                    const CatalogEntry& entry,
                                    const Binding& bind, uint64_t seed,
                                    std::optional<double> tolerance, bool all);

// Runs one launch. Catalog kernels get seeded inputs for any parameter not
// given in `input_files`; other specs need a file for every parameter. When
// `out_dir` is set, every parameter, the oracle output (catalog kernels) and
// meta.json are written there.
nlohmann::ordered_json SimulateReport(
    const CompiledKernel& kernel, const CatalogEntry* entry,
    const Binding& bind, uint64_t seed,
    const std::map<std::string, std::string>& input_files,
    const std::string& out_dir);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_DRIVER_H_
