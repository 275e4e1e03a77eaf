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

// Built-in kernels. Besides the KernelSpec, each entry describes its problem:
// named problem dims (M, N, K, ...), every tensor parameter's shape in terms
// of those dims, and how to draw random configurations for verification.

#ifndef TILEWRIGHT_SRC_CATALOG_H_
#define TILEWRIGHT_SRC_CATALOG_H_

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tileir.h"

namespace tw {

enum class KernelClass { kElementwise, kReduction };

struct CatalogEntry {
  KernelSpec spec;
  KernelClass kernel_class = KernelClass::kElementwise;
  std::vector<std::string> dims;
  std::map<std::string, std::vector<SymExpr>> shapes;  // over `dims`
  Binding default_dims;
  Binding default_meta;
  // Meta-parameters derived from the problem dims (e.g. padded row width).
  std::function<Binding(const Binding& dims)> derived_meta;
  // Draws problem dims for a random configuration.
  std::function<Binding(std::mt19937_64& rng)> random_dims;
  // Meta-parameters drawn from the block-size set in random configurations.
  std::vector<std::string> block_meta;
  // Rows may be filled with a constant (degenerate reductions).
  bool constant_rows = false;
};

// Block sizes used by randomized configurations.
inline constexpr int64_t kBlockSizes[] = {1, 2, 3, 4, 8, 16};

const std::vector<std::string>& CatalogNames();

// nullptr for names outside the catalog.
const CatalogEntry* FindCatalogEntry(const std::string& name);
const KernelSpec* FindCatalogSpec(const std::string& name);

// Throws Error(kOutOfScope) for kernels deliberately not provided and
// Error(kInvalidArgument) for unknown names.
const CatalogEntry& CatalogEntryFor(const std::string& name);
const KernelSpec& CatalogSpec(const std::string& name);

int64_t NextPowerOfTwo(int64_t n);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_CATALOG_H_
