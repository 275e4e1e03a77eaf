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

#include "catalog.h"

#include <algorithm>
#include <limits>

#include "error.h"

namespace tw {
namespace {

using Kind = ArrangeOp::Kind;

SymExpr S(const std::string& name) { return SymExpr::Sym(name); }
SymExpr C(int64_t v) { return SymExpr::Const(v); }

ArrangeArg E(SymExpr e) { return ArrangeArg::Expr(std::move(e)); }
ArrangeArg Keep() { return ArrangeArg::Default(); }
ArrangeArg ShapeOf(const std::string& p, int level, int dim) {
  return ArrangeArg::ShapeOf(p, level, dim);
}

ArrangeOp Tile(std::vector<ArrangeArg> shape,
               std::optional<std::vector<ArrangeArg>> strides = {}) {
  ArrangeOp op;
  op.kind = Kind::kTile;
  op.shape = std::move(shape);
  op.strides = std::move(strides);
  return op;
}
ArrangeOp Expand(std::vector<ArrangeArg> shape) {
  ArrangeOp op;
  op.kind = Kind::kExpand;
  op.shape = std::move(shape);
  return op;
}
ArrangeOp Squeeze(int dim) {
  ArrangeOp op;
  op.kind = Kind::kSqueeze;
  op.dim = dim;
  return op;
}
ArrangeOp Permute(std::vector<int> order) {
  ArrangeOp op;
  op.kind = Kind::kPermute;
  op.order = std::move(order);
  return op;
}
ArrangeOp Flatten(int start_dim, std::optional<int> end_dim) {
  ArrangeOp op;
  op.kind = Kind::kFlatten;
  op.start_dim = start_dim;
  op.end_dim = end_dim;
  return op;
}
ArrangeOp Ravel() {
  ArrangeOp op;
  op.kind = Kind::kRavel;
  return op;
}
ArrangeOp Inner(std::vector<ArrangeOp> ops) {
  ArrangeOp op;
  op.kind = Kind::kInner;
  op.ops = std::move(ops);
  return op;
}

ParamDecl In(const std::string& name, int rank, bool shape_constexpr = false) {
  return {name, rank, ScalarKind::kF32, Role::kIn, shape_constexpr};
}
ParamDecl Out(const std::string& name, int rank, bool shape_constexpr = false) {
  return {name, rank, ScalarKind::kF32, Role::kOut, shape_constexpr};
}

ShapeCheck Eq(SymExpr a, SymExpr b, std::string what) {
  return {std::move(a), std::move(b), std::move(what)};
}

int64_t Uniform(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

const SymExpr kBM = S("BLOCK_SIZE_M");
const SymExpr kBN = S("BLOCK_SIZE_N");
const SymExpr kBK = S("BLOCK_SIZE_K");

// Row-block by K-block tiles of `a`, one row of them per program, repeated
// across the output's columns.
std::vector<ArrangeOp> MatmulLhs(const std::string& out, int out_cols_dim) {
  return {Tile({E(kBM), E(kBK)}), Tile({E(C(1)), Keep()}),
          Expand({Keep(), ShapeOf(out, 0, out_cols_dim)}),
          Inner({Squeeze(0)})};
}

std::vector<ArrangeOp> MatmulRhs(const std::string& out, int out_rows_dim) {
  return {Tile({E(kBK), E(kBN)}), Tile({Keep(), E(C(1))}),
          Expand({ShapeOf(out, 0, out_rows_dim), Keep()}),
          Inner({Squeeze(1)})};
}

std::vector<TileStmt> MatmulAccumulate(const std::string& lhs,
                                       const std::string& rhs) {
  return {
      TileStmt::Let("accumulator", ir::Zeros({kBM, kBN})),
      TileStmt::For("k", ir::ShapeOf(lhs, 0),
                    {TileStmt::Accumulate(
                        "accumulator",
                        ir::Dot(ir::Load(lhs, {ir::Local("k")}),
                                ir::Load(rhs, {ir::Local("k")})))}),
  };
}

Binding MatmulBlocks(int64_t m, int64_t n, int64_t k) {
  return {{"BLOCK_SIZE_M", m}, {"BLOCK_SIZE_N", n}, {"BLOCK_SIZE_K", k}};
}

const std::vector<std::string> kMatmulBlocks = {"BLOCK_SIZE_M", "BLOCK_SIZE_N",
                                                "BLOCK_SIZE_K"};

CatalogEntry MakeAdd() {
  CatalogEntry e;
  KernelSpec& s = e.spec;
  s.name = "add";
  s.params = {In("input", 1), In("other", 1), Out("output", 1)};
  s.meta = {"BLOCK_SIZE"};
  for (const char* p : {"input", "other", "output"}) {
    s.arrangement[p] = {Tile({E(S("BLOCK_SIZE"))})};
  }
  s.application = {
      TileStmt::Store("output", ir::Add(ir::Load("input"), ir::Load("other")))};
  e.dims = {"N"};
  e.shapes = {{"input", {S("N")}}, {"other", {S("N")}}, {"output", {S("N")}}};
  e.default_dims = {{"N", 10}};
  e.default_meta = {{"BLOCK_SIZE", 4}};
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"N", Uniform(rng, 1, 64)}};
  };
  e.block_meta = {"BLOCK_SIZE"};
  return e;
}

CatalogEntry MakeSilu() {
  CatalogEntry e;
  KernelSpec& s = e.spec;
  s.name = "silu";
  s.params = {In("input", 1), Out("output", 1)};
  s.meta = {"BLOCK_SIZE"};
  for (const char* p : {"input", "output"}) {
    s.arrangement[p] = {Tile({E(S("BLOCK_SIZE"))})};
  }
  s.application = {
      TileStmt::Let("x", ir::Load("input")),
      TileStmt::Store("output",
                      ir::Mul(ir::Local("x"), ir::Sigmoid(ir::Local("x")))),
  };
  e.dims = {"N"};
  e.shapes = {{"input", {S("N")}}, {"output", {S("N")}}};
  e.default_dims = {{"N", 10}};
  e.default_meta = {{"BLOCK_SIZE", 4}};
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"N", Uniform(rng, 1, 64)}};
  };
  e.block_meta = {"BLOCK_SIZE"};
  return e;
}

// One program per row; the row is a single tile padded to a power of two.
std::vector<ArrangeOp> RowTile() {
  return {Tile({E(C(1)), E(S("COLS_PADDED"))}), Inner({Squeeze(0)})};
}

Binding PaddedColumns(const Binding& dims) {
  return {{"COLS_PADDED", NextPowerOfTwo(dims.at("N"))}};
}

CatalogEntry MakeSoftmax() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "softmax";
  s.params = {In("input", 2), Out("output", 2)};
  s.meta = {"COLS_PADDED"};
  s.arrangement["input"] = RowTile();
  s.arrangement["output"] = RowTile();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  s.application = {
      TileStmt::Let("row", ir::Load("input", {}, neg_inf)),
      TileStmt::Let("row_max", ir::Max(ir::Local("row"), 0)),
      TileStmt::Let("numerator",
                    ir::Exp(ir::Sub(ir::Local("row"), ir::Local("row_max")))),
      TileStmt::Let("denominator", ir::Sum(ir::Local("numerator"), 0)),
      TileStmt::Store("output", ir::Div(ir::Local("numerator"),
                                        ir::Local("denominator"))),
  };
  s.checks = {
      Eq(CeilDiv(S("input_size_1"), S("COLS_PADDED")), C(1),
         "COLS_PADDED covers a whole row"),
      Eq(S("input_size_0"), S("output_size_0"), "output rows"),
      Eq(S("input_size_1"), S("output_size_1"), "output columns"),
  };
  e.dims = {"M", "N"};
  e.shapes = {{"input", {S("M"), S("N")}}, {"output", {S("M"), S("N")}}};
  e.default_dims = {{"M", 4}, {"N", 10}};
  e.derived_meta = PaddedColumns;
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"M", Uniform(rng, 1, 64)}, {"N", Uniform(rng, 1, 64)}};
  };
  e.constant_rows = true;
  return e;
}

CatalogEntry MakeRmsNorm() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "rms_norm";
  s.params = {In("input", 2), In("weight", 2), Out("output", 2)};
  s.meta = {"COLS_PADDED"};
  s.arrangement["input"] = RowTile();
  s.arrangement["output"] = RowTile();
  s.arrangement["weight"] = {Tile({E(C(1)), E(S("COLS_PADDED"))}),
                             Expand({ShapeOf("input", 0, 0), Keep()}),
                             Inner({Squeeze(0)})};
  s.application = {
      TileStmt::Let("x", ir::Load("input")),
      TileStmt::Let("mean_square",
                    ir::Div(ir::Sum(ir::Mul(ir::Local("x"), ir::Local("x")), 0),
                            ir::SymValue(S("input_size_1")))),
      TileStmt::Let("inv_rms",
                    ir::Div(ir::Lit(1.0), ir::Sqrt(ir::Add(ir::Local("mean_square"),
                                                           ir::Lit(1e-6))))),
      TileStmt::Store("output",
                      ir::Mul(ir::Mul(ir::Local("x"), ir::Local("inv_rms")),
                              ir::Load("weight"))),
  };
  s.checks = {
      Eq(CeilDiv(S("input_size_1"), S("COLS_PADDED")), C(1),
         "COLS_PADDED covers a whole row"),
      Eq(S("weight_size_1"), S("input_size_1"), "weight columns"),
      Eq(S("input_size_0"), S("output_size_0"), "output rows"),
      Eq(S("input_size_1"), S("output_size_1"), "output columns"),
  };
  e.dims = {"M", "N"};
  e.shapes = {{"input", {S("M"), S("N")}},
              {"weight", {C(1), S("N")}},
              {"output", {S("M"), S("N")}}};
  e.default_dims = {{"M", 4}, {"N", 10}};
  e.derived_meta = PaddedColumns;
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"M", Uniform(rng, 1, 64)}, {"N", Uniform(rng, 1, 64)}};
  };
  e.constant_rows = true;
  return e;
}

CatalogEntry MakeMm() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "mm";
  s.params = {In("input", 2), In("other", 2), Out("output", 2)};
  s.meta = kMatmulBlocks;
  s.arrangement["output"] = {Tile({E(kBM), E(kBN)})};
  s.arrangement["input"] = MatmulLhs("output", 1);
  s.arrangement["other"] = MatmulRhs("output", 0);
  s.application = MatmulAccumulate("input", "other");
  s.application.push_back(TileStmt::Store("output", ir::Local("accumulator")));
  s.checks = {
      Eq(S("input_size_1"), S("other_size_0"), "inner dimensions"),
      Eq(S("input_size_0"), S("output_size_0"), "output rows"),
      Eq(S("other_size_1"), S("output_size_1"), "output columns"),
  };
  e.dims = {"M", "N", "K"};
  e.shapes = {{"input", {S("M"), S("K")}},
              {"other", {S("K"), S("N")}},
              {"output", {S("M"), S("N")}}};
  e.default_dims = {{"M", 4}, {"N", 8}, {"K", 6}};
  e.default_meta = MatmulBlocks(2, 3, 4);
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"M", Uniform(rng, 1, 64)},
                   {"N", Uniform(rng, 1, 64)},
                   {"K", Uniform(rng, 1, 64)}};
  };
  e.block_meta = kMatmulBlocks;
  return e;
}

CatalogEntry MakeBmm() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "bmm";
  s.params = {In("input", 3), In("other", 3), Out("output", 3)};
  s.meta = kMatmulBlocks;
  s.arrangement["output"] = {Tile({E(C(1)), E(kBM), E(kBN)}),
                             Inner({Squeeze(0)})};
  s.arrangement["input"] = {
      Tile({E(C(1)), E(kBM), E(kBK)}), Tile({E(C(1)), E(C(1)), Keep()}),
      Expand({Keep(), Keep(), ShapeOf("output", 0, 2)}),
      Inner({Squeeze(0), Squeeze(0), Inner({Squeeze(0)})})};
  s.arrangement["other"] = {
      Tile({E(C(1)), E(kBK), E(kBN)}), Tile({E(C(1)), Keep(), E(C(1))}),
      Expand({Keep(), ShapeOf("output", 0, 1), Keep()}),
      Inner({Squeeze(0), Squeeze(1), Inner({Squeeze(0)})})};
  s.application = MatmulAccumulate("input", "other");
  s.application.push_back(TileStmt::Store("output", ir::Local("accumulator")));
  s.checks = {
      Eq(S("input_size_0"), S("other_size_0"), "batch"),
      Eq(S("input_size_0"), S("output_size_0"), "output batch"),
      Eq(S("input_size_2"), S("other_size_1"), "inner dimensions"),
      Eq(S("input_size_1"), S("output_size_1"), "output rows"),
      Eq(S("other_size_2"), S("output_size_2"), "output columns"),
  };
  e.dims = {"B", "M", "N", "K"};
  e.shapes = {{"input", {S("B"), S("M"), S("K")}},
              {"other", {S("B"), S("K"), S("N")}},
              {"output", {S("B"), S("M"), S("N")}}};
  e.default_dims = {{"B", 2}, {"M", 4}, {"N", 8}, {"K", 6}};
  e.default_meta = MatmulBlocks(2, 3, 4);
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"B", Uniform(rng, 1, 4)},
                   {"M", Uniform(rng, 1, 32)},
                   {"N", Uniform(rng, 1, 32)},
                   {"K", Uniform(rng, 1, 32)}};
  };
  e.block_meta = kMatmulBlocks;
  return e;
}

CatalogEntry MakeAddmm() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "addmm";
  s.params = {In("input", 2), In("mat1", 2),  In("mat2", 2),
              In("beta", 0),  In("alpha", 0), Out("output", 2)};
  s.meta = kMatmulBlocks;
  s.arrangement["output"] = {Tile({E(kBM), E(kBN)})};
  s.arrangement["input"] = {Tile({E(kBM), E(kBN)})};
  s.arrangement["mat1"] = MatmulLhs("output", 1);
  s.arrangement["mat2"] = MatmulRhs("output", 0);
  s.application = MatmulAccumulate("mat1", "mat2");
  s.application.push_back(TileStmt::Store(
      "output",
      ir::Add(ir::Mul(ir::Load("beta"), ir::Load("input")),
              ir::Mul(ir::Load("alpha"), ir::Local("accumulator")))));
  s.checks = {
      Eq(S("mat1_size_1"), S("mat2_size_0"), "inner dimensions"),
      Eq(S("mat1_size_0"), S("output_size_0"), "output rows"),
      Eq(S("mat2_size_1"), S("output_size_1"), "output columns"),
      Eq(S("input_size_0"), S("output_size_0"), "input rows"),
      Eq(S("input_size_1"), S("output_size_1"), "input columns"),
  };
  e.dims = {"M", "N", "K"};
  e.shapes = {{"input", {S("M"), S("N")}},
              {"mat1", {S("M"), S("K")}},
              {"mat2", {S("K"), S("N")}},
              {"output", {S("M"), S("N")}}};
  e.default_dims = {{"M", 4}, {"N", 8}, {"K", 6}};
  e.default_meta = MatmulBlocks(2, 3, 4);
  e.random_dims = [](std::mt19937_64& rng) {
    return Binding{{"M", Uniform(rng, 1, 64)},
                   {"N", Uniform(rng, 1, 64)},
                   {"K", Uniform(rng, 1, 64)}};
  };
  e.block_meta = kMatmulBlocks;
  return e;
}

// Implicit GEMM: the input is viewed as an (N*P*Q, C*R*S) matrix of sliding
// windows, the filter as (C*R*S, K), the output as (N*P*Q, K), and the
// matrix multiplication kernel's arrangement and application do the rest.
CatalogEntry MakeConv2d() {
  CatalogEntry e;
  e.kernel_class = KernelClass::kReduction;
  KernelSpec& s = e.spec;
  s.name = "conv2d";
  s.params = {In("input", 4, true), In("filter", 4, true),
              Out("output", 4, true)};
  s.base = "mm";
  s.arrangement["input"] = {
      Tile({E(C(1)), E(S("filter_size_1")), E(S("filter_size_2")),
            E(S("filter_size_3"))},
           std::vector<ArrangeArg>{Keep(), Keep(), E(C(1)), E(C(1))}),
      Squeeze(1),
      Inner({Squeeze(0)}),
      Ravel(),
      Flatten(0, 3),
      Flatten(1, std::nullopt),
  };
  s.arrangement["filter"] = {Flatten(1, std::nullopt), Permute({1, 0})};
  s.arrangement["output"] = {Permute({0, 2, 3, 1}), Flatten(0, 3)};
  s.checks = {
      Eq(S("input_size_1"), S("filter_size_1"), "channels"),
      Eq(S("output_size_0"), S("input_size_0"), "output batch"),
      Eq(S("output_size_1"), S("filter_size_0"), "output channels"),
      Eq(S("output_size_2"), S("input_size_2") - S("filter_size_2") + C(1),
         "output height"),
      Eq(S("output_size_3"), S("input_size_3") - S("filter_size_3") + C(1),
         "output width"),
  };
  e.dims = {"N", "C", "H", "W", "K", "R", "S"};
  e.shapes = {
      {"input", {S("N"), S("C"), S("H"), S("W")}},
      {"filter", {S("K"), S("C"), S("R"), S("S")}},
      {"output",
       {S("N"), S("K"), S("H") - S("R") + C(1), S("W") - S("S") + C(1)}},
  };
  e.default_dims = {{"N", 1}, {"C", 2}, {"H", 5}, {"W", 5},
                    {"K", 3}, {"R", 3}, {"S", 3}};
  e.default_meta = MatmulBlocks(4, 2, 4);
  e.random_dims = [](std::mt19937_64& rng) {
    Binding b;
    b["N"] = Uniform(rng, 1, 2);
    b["C"] = Uniform(rng, 1, 4);
    b["K"] = Uniform(rng, 1, 4);
    b["R"] = Uniform(rng, 1, 3);
    b["S"] = Uniform(rng, 1, 3);
    b["H"] = b["R"] + Uniform(rng, 0, 7);
    b["W"] = b["S"] + Uniform(rng, 0, 7);
    return b;
  };
  e.block_meta = kMatmulBlocks;
  return e;
}

const std::map<std::string, CatalogEntry>& Entries() {
  static const auto* entries = [] {
    auto* m = new std::map<std::string, CatalogEntry>;
    for (CatalogEntry e : {MakeAdd(), MakeSilu(), MakeSoftmax(), MakeRmsNorm(),
                           MakeMm(), MakeBmm(), MakeAddmm(), MakeConv2d()}) {
      std::string name = e.spec.name;
      m->emplace(std::move(name), std::move(e));
    }
    return m;
  }();
  return *entries;
}

}  // namespace

int64_t NextPowerOfTwo(int64_t n) {
  int64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

const std::vector<std::string>& CatalogNames() {
  static const std::vector<std::string> names = {
      "add", "silu", "softmax", "rms_norm", "mm", "bmm", "addmm", "conv2d"};
  return names;
}

const CatalogEntry* FindCatalogEntry(const std::string& name) {
  auto it = Entries().find(name);
  return it == Entries().end() ? nullptr : &it->second;
}

const KernelSpec* FindCatalogSpec(const std::string& name) {
  const CatalogEntry* e = FindCatalogEntry(name);
  return e ? &e->spec : nullptr;
}

const CatalogEntry& CatalogEntryFor(const std::string& name) {
  if (const CatalogEntry* e = FindCatalogEntry(name)) return *e;
  if (name == "sdpa" || name == "rope") {
    Fail(ErrorCode::kOutOfScope,
         "kernel '" + name + "' is out of scope for this compiler");
  }
  Fail(ErrorCode::kInvalidArgument, "unknown kernel '" + name + "'");
}

const KernelSpec& CatalogSpec(const std::string& name) {
  return CatalogEntryFor(name).spec;
}

}  // namespace tw
