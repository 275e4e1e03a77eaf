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

#include "htensor.h"

#include <algorithm>

#include "error.h"

namespace tw {

const char* ScalarKindName(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::kF32:
      return "f32";
    case ScalarKind::kF16:
      return "f16";
    case ScalarKind::kI32:
      return "i32";
  }
  return "?";
}

ScalarKind ScalarKindFromName(const std::string& name) {
  if (name == "f32") return ScalarKind::kF32;
  if (name == "f16") return ScalarKind::kF16;
  if (name == "i32") return ScalarKind::kI32;
  Fail(ErrorCode::kSpec, "unknown scalar kind '" + name + "'");
}

namespace {

SymExpr ProductOf(const std::vector<Factor>& factors) {
  std::vector<SymExpr> sizes;
  sizes.reserve(factors.size());
  for (const Factor& f : factors) sizes.push_back(f.size);
  return Product(sizes);
}

std::string Describe(const SymExpr& e) { return ToJson(e).dump(); }

}  // namespace

SymExpr Dim::Size() const { return ProductOf(factors); }
SymExpr Group::Size() const { return ProductOf(factors); }

std::vector<SymExpr> Level::Shape() const {
  std::vector<SymExpr> shape;
  shape.reserve(dims.size());
  for (const Dim& d : dims) shape.push_back(d.Size());
  return shape;
}

HTensor HTensor::NewParam(const std::string& name, int rank, ScalarKind kind) {
  if (rank < 1) {
    Fail(ErrorCode::kSpec, "parameter '" + name + "' must have rank >= 1");
  }
  std::vector<SymExpr> sizes, strides;
  for (int i = 0; i < rank; ++i) {
    sizes.push_back(SymExpr::Sym(name + "_size_" + std::to_string(i)));
    strides.push_back(SymExpr::Sym(name + "_stride_" + std::to_string(i)));
  }
  return NewParam(name, kind, std::move(sizes), std::move(strides));
}

HTensor HTensor::NewParam(const std::string& name, ScalarKind kind,
                          std::vector<SymExpr> sizes,
                          std::vector<SymExpr> strides) {
  if (!IsIdentifier(name)) {
    Fail(ErrorCode::kSpec, "invalid parameter name '" + name + "'");
  }
  if (sizes.empty()) {
    Fail(ErrorCode::kSpec, "parameter '" + name + "' must have rank >= 1");
  }
  if (sizes.size() != strides.size()) {
    Fail(ErrorCode::kSpec, "parameter '" + name + "': sizes/strides mismatch");
  }
  for (size_t d = 0; d < sizes.size(); ++d) {
    SymExpr s = Simplify(sizes[d]);
    SymExpr st = Simplify(strides[d]);
    if ((s.is_const() && s.value() < 0) || (st.is_const() && st.value() < 0)) {
      Fail(ErrorCode::kSpec,
           "parameter '" + name + "' has a negative size or stride");
    }
  }
  HTensor t;
  t.name_ = name;
  t.kind_ = kind;
  Level level;
  for (size_t d = 0; d < sizes.size(); ++d) {
    level.dims.push_back(
        Dim{{Factor{sizes[d], SymExpr::Const(1), Factor::Target::kSourceDim,
                    static_cast<int>(d)}}});
  }
  t.levels_.push_back(std::move(level));
  t.source_sizes_ = std::move(sizes);
  t.source_strides_ = std::move(strides);
  return t;
}

int HTensor::CheckDim(int dim) const {
  int rank = static_cast<int>(levels_[0].dims.size());
  if (dim < 0 || dim >= rank) {
    Fail(ErrorCode::kSpec, "dim " + std::to_string(dim) +
                               " out of range for level-0 rank " +
                               std::to_string(rank) + " of '" + name_ + "'");
  }
  return dim;
}

void HTensor::RequireUnit(const Dim& d, int index, const char* op) {
  if (d.factors.size() != 1) {
    Fail(ErrorCode::kSpec, std::string(op) + ": dim " + std::to_string(index) +
                               " of '" + name_ + "' is a flattened dim");
  }
  SymExpr size = Simplify(d.factors[0].size);
  if (size.is_const(1)) return;
  if (size.is_const()) {
    Fail(ErrorCode::kSpec, std::string(op) + ": dim " + std::to_string(index) +
                               " of '" + name_ + "' has size " +
                               std::to_string(size.value()) + ", expected 1");
  }
  checks_.push_back({size, SymExpr::Const(1),
                     std::string(op) + " of '" + name_ + "' dim " +
                         std::to_string(index) + " requires size 1"});
}

HTensor HTensor::Tile(const std::vector<ShapeArg>& tile_shape,
                      const std::optional<std::vector<ShapeArg>>& strides) const {
  const Level& top = levels_[0];
  if (tile_shape.size() != top.dims.size()) {
    Fail(ErrorCode::kSpec, "tile: shape has " +
                               std::to_string(tile_shape.size()) +
                               " entries but '" + name_ + "' level 0 has " +
                               std::to_string(top.dims.size()) + " dims");
  }
  if (strides && strides->size() != tile_shape.size()) {
    Fail(ErrorCode::kSpec, "tile: strides length differs from tile shape");
  }
  HTensor out = *this;
  Level outer, inner;
  for (size_t d = 0; d < top.dims.size(); ++d) {
    Factor f;
    if (top.dims[d].factors.size() == 1) {
      f = top.dims[d].factors[0];
    } else {
      out.groups_.push_back(Group{top.dims[d].factors});
      f = Factor{out.groups_.back().Size(), SymExpr::Const(1),
                 Factor::Target::kGroup,
                 static_cast<int>(out.groups_.size()) - 1};
    }
    const SymExpr size = f.size;
    const bool full = !tile_shape[d].has_value();
    SymExpr tile = full ? size : Simplify(*tile_shape[d]);
    if (tile.is_const() && tile.value() <= 0) {
      Fail(ErrorCode::kSpec, "tile: non-positive tile size " + Describe(tile));
    }
    SymExpr stride = tile;
    if (strides && (*strides)[d].has_value()) {
      stride = Simplify(*(*strides)[d]);
      if (stride.is_const() && stride.value() <= 0) {
        Fail(ErrorCode::kSpec, "tile: non-positive stride " + Describe(stride));
      }
    }
    SymExpr count;
    if (full) {
      count = SymExpr::Const(1);
    } else if (stride == tile) {
      count = Simplify(CeilDiv(size, tile));
    } else {
      count = Simplify(FloorDiv(size - tile, stride) + SymExpr::Const(1));
    }
    outer.dims.push_back(
        Dim{{Factor{count, Simplify(f.step * stride), f.target, f.index}}});
    inner.dims.push_back(Dim{{Factor{tile, f.step, f.target, f.index}}});
  }
  out.levels_.clear();
  out.levels_.push_back(std::move(outer));
  out.levels_.push_back(std::move(inner));
  for (size_t l = 1; l < levels_.size(); ++l) out.levels_.push_back(levels_[l]);
  return out;
}

HTensor HTensor::Expand(const std::vector<ShapeArg>& shape) const {
  const Level& top = levels_[0];
  if (shape.size() != top.dims.size()) {
    Fail(ErrorCode::kSpec, "expand: shape has " + std::to_string(shape.size()) +
                               " entries but '" + name_ + "' level 0 has " +
                               std::to_string(top.dims.size()) + " dims");
  }
  HTensor out = *this;
  for (size_t d = 0; d < shape.size(); ++d) {
    if (!shape[d]) continue;
    Dim& dim = out.levels_[0].dims[d];
    out.RequireUnit(dim, static_cast<int>(d), "expand");
    dim.factors[0].size = Simplify(*shape[d]);
    dim.factors[0].step = SymExpr::Const(0);
  }
  return out;
}

HTensor HTensor::Squeeze(int dim) const {
  CheckDim(dim);
  HTensor out = *this;
  out.RequireUnit(levels_[0].dims[dim], dim, "squeeze");
  out.levels_[0].dims.erase(out.levels_[0].dims.begin() + dim);
  return out;
}

HTensor HTensor::Permute(const std::vector<int>& order) const {
  const auto& dims = levels_[0].dims;
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == dims.size();
  for (size_t i = 0; ok && i < sorted.size(); ++i) {
    ok = sorted[i] == static_cast<int>(i);
  }
  if (!ok) {
    Fail(ErrorCode::kSpec, "permute: order is not a permutation of 0.." +
                               std::to_string(dims.size()));
  }
  HTensor out = *this;
  for (size_t i = 0; i < order.size(); ++i) {
    out.levels_[0].dims[i] = dims[order[i]];
  }
  return out;
}

HTensor HTensor::Flatten(int start_dim, std::optional<int> end_dim) const {
  int rank = static_cast<int>(levels_[0].dims.size());
  int end = end_dim.value_or(rank);
  if (start_dim < 0 || end > rank || end - start_dim < 2) {
    Fail(ErrorCode::kSpec, "flatten: span [" + std::to_string(start_dim) +
                               ", " + std::to_string(end) +
                               ") must cover at least two of " +
                               std::to_string(rank) + " dims");
  }
  HTensor out = *this;
  auto& dims = out.levels_[0].dims;
  Dim merged;
  for (int i = start_dim; i < end; ++i) {
    merged.factors.insert(merged.factors.end(), dims[i].factors.begin(),
                          dims[i].factors.end());
  }
  dims.erase(dims.begin() + start_dim, dims.begin() + end);
  dims.insert(dims.begin() + start_dim, std::move(merged));
  return out;
}

HTensor HTensor::Ravel() const {
  HTensor out = *this;
  Level single;
  for (const Level& level : levels_) {
    single.dims.insert(single.dims.end(), level.dims.begin(), level.dims.end());
  }
  out.levels_ = {std::move(single)};
  return out;
}

HTensor HTensor::Inner() const {
  if (levels_.size() < 2) {
    Fail(ErrorCode::kSpec, "'" + name_ + "' has a single level; no inner tensor");
  }
  HTensor out = *this;
  out.levels_.erase(out.levels_.begin());
  return out;
}

HTensor HTensor::WithInner(const HTensor& inner) const {
  if (inner.name_ != name_ || inner.source_sizes_ != source_sizes_) {
    Fail(ErrorCode::kSpec, "inner tensor of '" + inner.name_ +
                               "' cannot be assigned into '" + name_ + "'");
  }
  if (inner.groups_.size() < groups_.size() ||
      !std::equal(groups_.begin(), groups_.end(), inner.groups_.begin())) {
    Fail(ErrorCode::kSpec, "inner tensor of '" + name_ + "' has diverged");
  }
  HTensor out = *this;
  out.levels_.resize(1);
  out.levels_.insert(out.levels_.end(), inner.levels_.begin(),
                     inner.levels_.end());
  out.groups_ = inner.groups_;
  for (const ShapeCheck& c : inner.checks_) {
    if (std::find(out.checks_.begin(), out.checks_.end(), c) ==
        out.checks_.end()) {
      out.checks_.push_back(c);
    }
  }
  return out;
}

std::vector<SymExpr> HTensor::Shape(int level) const {
  if (level < 0 || level >= num_levels()) {
    Fail(ErrorCode::kSpec, "level " + std::to_string(level) +
                               " out of range for '" + name_ + "'");
  }
  return levels_[level].Shape();
}

SymExpr HTensor::ElementCount() const {
  std::vector<SymExpr> sizes;
  for (const Level& level : levels_) {
    for (const Dim& d : level.dims) sizes.push_back(d.Size());
  }
  return Product(sizes);
}

}  // namespace tw
