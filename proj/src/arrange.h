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

// Serial-to-parallel lowering of an arrangement.
//
// Level 0 of every arranged parameter is the grid: its dims are bound to the
// program id components pid_i. The innermost level is the tile each program
// operates on: its dims are bound to lane variables. Levels in between are
// indexed from the application (input[k]) and are bound to nest variables.

#ifndef TILEWRIGHT_SRC_ARRANGE_H_
#define TILEWRIGHT_SRC_ARRANGE_H_

#include <string>
#include <utility>
#include <vector>

#include "htensor.h"
#include "symexpr.h"

namespace tw {

using Arrangement = std::vector<std::pair<std::string, HTensor>>;

struct GridSpec {
  std::vector<SymExpr> sizes;
  SymExpr total;
  // pid_i in terms of the linear symbol "pid", row-major, last dim fastest.
  std::vector<SymExpr> pid_components;
};

struct ValidatedArrangement {
  GridSpec grid;
  // Level-0 equalities that could not be proven structurally, plus every
  // deferred check recorded by the meta-operations.
  std::vector<ShapeCheck> launch_checks;
};

// `index < bound`; a mask is the conjunction of its terms.
struct MaskTerm {
  SymExpr index;
  SymExpr bound;
};

struct IndexMap {
  std::string param;
  std::vector<SymExpr> lane_sizes;  // innermost level shape
  std::vector<SymExpr> nest_sizes;  // intermediate levels, outermost first
  std::vector<SymExpr> source_index;  // I_d per source dim
  SymExpr offset;                     // sum_d I_d * stride_d
  std::vector<MaskTerm> mask;

  int lane_rank() const { return static_cast<int>(lane_sizes.size()); }
};

inline constexpr char kPidSymbol[] = "pid";
std::string PidVar(int i);
std::string LaneVar(int j);
std::string NestVar(int k);

ValidatedArrangement Validate(const Arrangement& arrangement);

// One IndexMap per parameter, in arrangement order.
std::vector<IndexMap> Lower(const Arrangement& arrangement,
                            const GridSpec& grid);
IndexMap LowerParam(const HTensor& tensor);

// Row-major decomposition of a linear program id.
std::vector<int64_t> DecomposePid(const GridSpec& grid, int64_t pid,
                                  const Binding& binding);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_ARRANGE_H_
