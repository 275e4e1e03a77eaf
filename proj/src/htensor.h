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

// Hierarchical symbolic tensors and their meta-operations.
//
// An HTensor never holds data. It describes how a source tensor of some rank
// is viewed as nested levels of dims; each dim is a mixed-radix list of
// factors, and each factor says how far one unit of its index advances along
// a source dim (or along a group, see below).
//
// Groups: tiling a dim that was produced by flatten cannot be expressed as
// per-factor steps, because a tile boundary may cut across the factors. Such a
// dim is first collapsed into a group: a linear index over the dim's original
// factors. The tile's outer and inner factors then step along that linear
// index, which lowering decomposes back into the original factors.

#ifndef TILEWRIGHT_SRC_HTENSOR_H_
#define TILEWRIGHT_SRC_HTENSOR_H_

#include <optional>
#include <string>
#include <vector>

#include "symexpr.h"

namespace tw {

enum class ScalarKind { kF32, kF16, kI32 };

const char* ScalarKindName(ScalarKind kind);
ScalarKind ScalarKindFromName(const std::string& name);

struct Factor {
  enum class Target { kSourceDim, kGroup };

  SymExpr size;
  SymExpr step;  // 0 for factors created by expand
  Target target = Target::kSourceDim;
  int index = 0;  // source dim or group id

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct Dim {
  std::vector<Factor> factors;

  SymExpr Size() const;
  friend bool operator==(const Dim&, const Dim&) = default;
};

struct Level {
  std::vector<Dim> dims;

  std::vector<SymExpr> Shape() const;
  friend bool operator==(const Level&, const Level&) = default;
};

struct Group {
  std::vector<Factor> factors;

  SymExpr Size() const;
  friend bool operator==(const Group&, const Group&) = default;
};

// A deferred equality that could not be decided symbolically; checked when the
// kernel is launched.
struct ShapeCheck {
  SymExpr lhs;
  SymExpr rhs;
  std::string what;

  friend bool operator==(const ShapeCheck&, const ShapeCheck&) = default;
};

// Meta-operation arguments. std::nullopt encodes the surface syntax -1:
// FULL for tile shapes, DEFAULT for strides, KEEP for expand.
using ShapeArg = std::optional<SymExpr>;

class HTensor {
 public:
  // A single-level tensor over a fresh parameter. Size and stride symbols are
  // named {name}_size_i and {name}_stride_i.
  static HTensor NewParam(const std::string& name, int rank, ScalarKind kind);
  // Same, with explicit size/stride expressions.
  static HTensor NewParam(const std::string& name, ScalarKind kind,
                          std::vector<SymExpr> sizes,
                          std::vector<SymExpr> strides);

  HTensor Tile(const std::vector<ShapeArg>& tile_shape,
               const std::optional<std::vector<ShapeArg>>& strides = {}) const;
  HTensor Expand(const std::vector<ShapeArg>& shape) const;
  HTensor Squeeze(int dim) const;
  HTensor Permute(const std::vector<int>& order) const;
  // Merges level-0 dims [start_dim, end_dim); end_dim is exclusive and
  // defaults to the level-0 rank.
  HTensor Flatten(int start_dim = 0, std::optional<int> end_dim = {}) const;
  HTensor Ravel() const;

  // The nested element tensor (levels 1..). Meta-ops act on level 0 only, so
  // deeper levels are edited with Inner/WithInner.
  HTensor Inner() const;
  HTensor WithInner(const HTensor& inner) const;

  const std::string& name() const { return name_; }
  ScalarKind scalar_kind() const { return kind_; }
  int source_rank() const { return static_cast<int>(source_sizes_.size()); }
  const std::vector<SymExpr>& source_sizes() const { return source_sizes_; }
  const std::vector<SymExpr>& source_strides() const { return source_strides_; }
  const std::vector<Level>& levels() const { return levels_; }
  const std::vector<Group>& groups() const { return groups_; }
  const std::vector<ShapeCheck>& checks() const { return checks_; }
  int num_levels() const { return static_cast<int>(levels_.size()); }

  // Simplified level shape.
  std::vector<SymExpr> Shape(int level = 0) const;
  // Product of every dim size over every level.
  SymExpr ElementCount() const;

  friend bool operator==(const HTensor&, const HTensor&) = default;

 private:
  HTensor() = default;
  int CheckDim(int dim) const;
  void RequireUnit(const Dim& d, int index, const char* op);

  std::string name_;
  ScalarKind kind_ = ScalarKind::kF32;
  std::vector<SymExpr> source_sizes_;
  std::vector<SymExpr> source_strides_;
  std::vector<Level> levels_;
  std::vector<Group> groups_;
  std::vector<ShapeCheck> checks_;
};

}  // namespace tw

#endif  // TILEWRIGHT_SRC_HTENSOR_H_
