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

#include "arrange.h"

#include <algorithm>

#include "error.h"

namespace tw {
namespace {

std::string ShapeString(const std::vector<SymExpr>& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += ToInfix(shape[i]);
  }
  return s + (shape.size() == 1 ? ",)" : ")");
}

void AddCheck(std::vector<ShapeCheck>& checks, ShapeCheck c) {
  if (std::find(checks.begin(), checks.end(), c) == checks.end()) {
    checks.push_back(std::move(c));
  }
}

// Splits `index` over a dim's factors, mixed-radix with the last factor
// fastest. The outermost factor is not reduced modulo its size so that an
// out-of-range linear index stays out of range (and masked).
std::vector<SymExpr> MixedRadix(const SymExpr& index,
                                const std::vector<Factor>& factors) {
  const size_t n = factors.size();
  std::vector<SymExpr> out(n);
  SymExpr inner_span = SymExpr::Const(1);
  for (size_t i = n; i-- > 0;) {
    SymExpr q = Simplify(FloorDiv(index, inner_span));
    out[i] = i == 0 ? q : Simplify(Mod(q, factors[i].size));
    inner_span = Simplify(inner_span * factors[i].size);
  }
  return out;
}

}  // namespace

std::string PidVar(int i) { return "pid_" + std::to_string(i); }
std::string LaneVar(int j) { return "lane_" + std::to_string(j); }
std::string NestVar(int k) { return "nest_" + std::to_string(k); }

ValidatedArrangement Validate(const Arrangement& arrangement) {
  if (arrangement.empty()) {
    Fail(ErrorCode::kSpec, "arrangement has no tensor parameters");
  }
  ValidatedArrangement out;
  for (const auto& [name, tensor] : arrangement) {
    if (tensor.num_levels() < 2) {
      Fail(ErrorCode::kSpec, "arranged parameter '" + name +
                                 "' has a single level; it must be tiled");
    }
  }
  const auto& [first_name, first] = arrangement.front();
  const std::vector<SymExpr> reference = first.Shape(0);
  for (size_t p = 1; p < arrangement.size(); ++p) {
    const auto& [name, tensor] = arrangement[p];
    std::vector<SymExpr> shape = tensor.Shape(0);
    if (shape.size() != reference.size()) {
      Fail(ErrorCode::kSpec, "outermost levels mismatch: '" + first_name +
                                 "' " + ShapeString(reference) + " vs '" +
                                 name + "' " + ShapeString(shape));
    }
    for (size_t d = 0; d < shape.size(); ++d) {
      if (shape[d] == reference[d]) continue;
      if (shape[d].is_const() && reference[d].is_const()) {
        Fail(ErrorCode::kSpec, "outermost levels mismatch: '" + first_name +
                                   "' " + ShapeString(reference) + " vs '" +
                                   name + "' " + ShapeString(shape));
      }
      AddCheck(out.launch_checks,
               {reference[d], shape[d],
                "level-0 dim " + std::to_string(d) + " of '" + first_name +
                    "' and '" + name + "'"});
    }
  }
  for (const auto& [name, tensor] : arrangement) {
    for (const ShapeCheck& c : tensor.checks()) AddCheck(out.launch_checks, c);
  }

  GridSpec& grid = out.grid;
  grid.sizes = reference;
  grid.total = Product(reference);
  const SymExpr pid = SymExpr::Sym(kPidSymbol);
  for (size_t i = 0; i < reference.size(); ++i) {
    std::vector<SymExpr> faster(reference.begin() + i + 1, reference.end());
    grid.pid_components.push_back(
        Simplify(Mod(FloorDiv(pid, Product(faster)), reference[i])));
  }
  return out;
}

IndexMap LowerParam(const HTensor& tensor) {
  const int num_levels = tensor.num_levels();
  if (num_levels < 2) {
    Fail(ErrorCode::kSpec, "cannot lower single-level tensor '" +
                               tensor.name() + "'");
  }
  IndexMap map;
  map.param = tensor.name();
  std::vector<SymExpr> source(tensor.source_rank(), SymExpr::Const(0));
  std::vector<SymExpr> group(tensor.groups().size(), SymExpr::Const(0));

  auto contribute = [&](const Factor& f, const SymExpr& idx) {
    SymExpr term = idx * f.step;
    auto& slot = f.target == Factor::Target::kGroup ? group.at(f.index)
                                                    : source.at(f.index);
    slot = Simplify(slot + term);
  };
  auto bind_dim = [&](const Dim& dim, const SymExpr& var) {
    std::vector<SymExpr> idx = MixedRadix(var, dim.factors);
    for (size_t i = 0; i < idx.size(); ++i) contribute(dim.factors[i], idx[i]);
  };

  int pid_count = 0, nest_count = 0, lane_count = 0;
  for (int l = 0; l < num_levels; ++l) {
    for (const Dim& dim : tensor.levels()[l].dims) {
      std::string var;
      if (l == 0) {
        var = PidVar(pid_count++);
      } else if (l == num_levels - 1) {
        var = LaneVar(lane_count++);
        map.lane_sizes.push_back(dim.Size());
      } else {
        var = NestVar(nest_count++);
        map.nest_sizes.push_back(dim.Size());
      }
      bind_dim(dim, SymExpr::Sym(var));
    }
  }

  // Group factors only ever target groups created before them, so resolving
  // from the newest group down sees every contribution first.
  for (size_t g = tensor.groups().size(); g-- > 0;) {
    const Group& grp = tensor.groups()[g];
    bind_dim(Dim{grp.factors}, group[g]);
    map.mask.push_back({group[g], grp.Size()});
  }

  SymExpr offset = SymExpr::Const(0);
  for (int d = 0; d < tensor.source_rank(); ++d) {
    offset = offset + source[d] * tensor.source_strides()[d];
    if (!source[d].is_const(0)) {
      map.mask.push_back({source[d], Simplify(tensor.source_sizes()[d])});
    }
  }
  // Source-dim terms first, then group ranges, so masks read naturally.
  std::rotate(map.mask.begin(),
              map.mask.begin() + static_cast<long>(tensor.groups().size()),
              map.mask.end());
  map.source_index = std::move(source);
  map.offset = Simplify(offset);
  return map;
}

std::vector<IndexMap> Lower(const Arrangement& arrangement,
                            const GridSpec& grid) {
  std::vector<IndexMap> maps;
  maps.reserve(arrangement.size());
  for (const auto& [name, tensor] : arrangement) {
    if (static_cast<int>(tensor.Shape(0).size()) !=
        static_cast<int>(grid.sizes.size())) {
      Fail(ErrorCode::kSpec, "'" + name + "' does not match the grid rank");
    }
    maps.push_back(LowerParam(tensor));
  }
  return maps;
}

std::vector<int64_t> DecomposePid(const GridSpec& grid, int64_t pid,
                                  const Binding& binding) {
  const int64_t total = Eval(grid.total, binding);
  if (pid < 0 || pid >= total) {
    Fail(ErrorCode::kInvalidArgument, "program id " + std::to_string(pid) +
                                          " outside grid of " +
                                          std::to_string(total));
  }
  std::vector<int64_t> out(grid.sizes.size());
  int64_t rest = pid;
  for (size_t i = grid.sizes.size(); i-- > 0;) {
    int64_t size = Eval(grid.sizes[i], binding);
    out[i] = rest % size;
    rest /= size;
  }
  return out;
}

}  // namespace tw
