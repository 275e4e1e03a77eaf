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
#ifndef TILEWRIGHT_TESTS_TEST_UTIL_H_
#define TILEWRIGHT_TESTS_TEST_UTIL_H_

#include <functional>
#include <string>
#include <vector>

#include "arrange.h"
#include "catalog.h"
#include "driver.h"
#include "symexpr.h"
#include "tileir.h"
#include "verify.h"

namespace tw::testing {

// Full symbol binding for a catalog kernel at the given problem dims and
// meta values: sizes, contiguous strides, meta and derived meta.
inline Binding KernelBinding(const CompiledKernel& k, const CatalogEntry& e,
                             const VerifyConfig& c) {
  SplitBindings split{c.dims, c.meta};
  Binding b = ImpliedSymbols(k, &e, split);
  for (const auto& [name, v] : c.meta) b[name] = v;
  return b;
}

struct Access {
  int64_t pid = 0;
  std::vector<int64_t> nest;
  std::vector<int64_t> lane;
  int64_t offset = 0;
  bool active = false;
};

// Visits every (program, nest index, lane index) of an index map.
inline void ForEachAccess(const GridSpec& grid, const IndexMap& m, Binding b,
                          const std::function<void(const Access&)>& fn) {
  const int64_t total = Eval(grid.total, b);
  std::vector<int64_t> nest_sizes, lane_sizes;
  for (const SymExpr& s : m.nest_sizes) nest_sizes.push_back(Eval(s, b));
  for (const SymExpr& s : m.lane_sizes) lane_sizes.push_back(Eval(s, b));
  auto odometer = [](std::vector<int64_t>& idx, const std::vector<int64_t>& n) {
    for (size_t d = idx.size(); d-- > 0;) {
      if (++idx[d] < n[d]) return true;
      idx[d] = 0;
    }
    return false;
  };
  auto empty = [](const std::vector<int64_t>& n) {
    for (int64_t s : n) {
      if (s <= 0) return true;
    }
    return false;
  };
  if (empty(nest_sizes) || empty(lane_sizes)) return;
  for (int64_t pid = 0; pid < total; ++pid) {
    b[kPidSymbol] = pid;
    for (size_t i = 0; i < grid.pid_components.size(); ++i) {
      b[PidVar(static_cast<int>(i))] = Eval(grid.pid_components[i], b);
    }
    Access a;
    a.pid = pid;
    a.nest.assign(nest_sizes.size(), 0);
    do {
      for (size_t k = 0; k < a.nest.size(); ++k) b[NestVar(static_cast<int>(k))] = a.nest[k];
      a.lane.assign(lane_sizes.size(), 0);
      do {
        for (size_t j = 0; j < a.lane.size(); ++j) b[LaneVar(static_cast<int>(j))] = a.lane[j];
        a.active = true;
        for (const MaskTerm& t : m.mask) {
          a.active = a.active && Eval(t.index, b) < Eval(t.bound, b);
        }
        a.offset = a.active ? Eval(m.offset, b) : -1;
        fn(a);
      } while (odometer(a.lane, lane_sizes));
    } while (odometer(a.nest, nest_sizes));
  }
}

}  // namespace tw::testing

#endif  // TILEWRIGHT_TESTS_TEST_UTIL_H_
