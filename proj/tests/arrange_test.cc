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
#include <gtest/gtest.h>

#include <map>
#include <set>

#include "arrange.h"
#include "catalog.h"
#include "error.h"
#include "test_util.h"
#include "tileir.h"
#include "verify.h"

namespace tw {
namespace {

using testing::Access;
using testing::ForEachAccess;
using testing::KernelBinding;

SymExpr C(int64_t v) { return SymExpr::Const(v); }

CompiledKernel CompileCatalog(const std::string& name) {
  return Compile(CatalogSpec(name));
}

TEST(ArrangeTest, AddGridIsCeilOfSizeOverBlock) {
  const CompiledKernel k = CompileCatalog("add");
  ASSERT_EQ(k.grid.sizes.size(), 1u);
  EXPECT_EQ(ToInfix(k.grid.sizes[0]), "cdiv(input_size_0, BLOCK_SIZE)");
}

TEST(ArrangeTest, AddProgramTwoMasksTheTail) {
  // N=10, BLOCK_SIZE=4: program 2 covers elements 8..11; 10 and 11 are masked.
  const CompiledKernel k = CompileCatalog("add");
  const IndexMap& m = k.MapFor("input");
  Binding b = {{"input_size_0", 10}, {"input_stride_0", 1}, {"BLOCK_SIZE", 4},
               {kPidSymbol, 2}};
  b[PidVar(0)] = Eval(k.grid.pid_components[0], b);
  ASSERT_EQ(b[PidVar(0)], 2);
  std::vector<int64_t> active, masked;
  for (int64_t lane = 0; lane < 4; ++lane) {
    b[LaneVar(0)] = lane;
    const int64_t element = Eval(m.source_index[0], b);
    bool on = true;
    for (const MaskTerm& t : m.mask) on = on && Eval(t.index, b) < Eval(t.bound, b);
    (on ? active : masked).push_back(element);
  }
  EXPECT_EQ(active, (std::vector<int64_t>{8, 9}));
  EXPECT_EQ(masked, (std::vector<int64_t>{10, 11}));
}

TEST(ArrangeTest, MmIndexMapsMatchHandTiling) {
  const CompiledKernel k = CompileCatalog("mm");
  const CatalogEntry& e = CatalogEntryFor("mm");
  VerifyConfig c;
  c.dims = {{"M", 5}, {"N", 7}, {"K", 6}};
  c.meta = {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 3}, {"BLOCK_SIZE_K", 4}};
  const Binding b = KernelBinding(k, e, c);
  const int64_t programs_n = 3;  // ceil(7 / 3)
  int seen = 0;
  ForEachAccess(k.grid, k.MapFor("input"), b, [&](const Access& a) {
    const int64_t p0 = a.pid / programs_n;
    const int64_t row = p0 * 2 + a.lane[0];
    const int64_t col = a.nest[0] * 4 + a.lane[1];
    EXPECT_EQ(a.active, row < 5 && col < 6);
    if (a.active) {
      EXPECT_EQ(a.offset, row * 6 + col);
    }
    ++seen;
  });
  // 3 x 3 programs, 2 nest steps, 2 x 4 lanes.
  EXPECT_EQ(seen, 9 * 2 * 8);
  ForEachAccess(k.grid, k.MapFor("output"), b, [&](const Access& a) {
    const int64_t row = (a.pid / programs_n) * 2 + a.lane[0];
    const int64_t col = (a.pid % programs_n) * 3 + a.lane[1];
    EXPECT_EQ(a.active, row < 5 && col < 7);
    if (a.active) {
      EXPECT_EQ(a.offset, row * 7 + col);
    }
  });
}

TEST(ArrangeTest, MmProgramZeroRunsTwoNestSteps) {
  const CompiledKernel k = CompileCatalog("mm");
  const IndexMap& m = k.MapFor("input");
  ASSERT_EQ(m.nest_sizes.size(), 1u);
  EXPECT_EQ(Eval(m.nest_sizes[0], {{"input_size_1", 6}, {"BLOCK_SIZE_K", 3}}), 2);
}

// Every catalog kernel, several configurations: each output element is
// written by exactly one (program, lane) and nothing outside is touched.
TEST(ArrangeTest, OutputWritesAreDisjointAndCovering) {
  for (const std::string& name : CatalogNames()) {
    const CatalogEntry& e = CatalogEntryFor(name);
    const CompiledKernel k = CompileCatalog(name);
    const std::string out = OutputParam(k.spec);
    for (const VerifyConfig& c : ConfigMatrix(e, 11, 6)) {
      const Binding b = KernelBinding(k, e, c);
      const auto shapes = ProblemShapes(e, c.dims);
      int64_t numel = 1;
      for (int64_t s : shapes.at(out)) numel *= s;
      std::vector<int> writes(numel, 0);
      ForEachAccess(k.grid, k.MapFor(out), b, [&](const Access& a) {
        if (!a.active) return;
        ASSERT_GE(a.offset, 0) << name;
        ASSERT_LT(a.offset, numel) << name;
        ++writes[a.offset];
      });
      for (int64_t i = 0; i < numel; ++i) {
        ASSERT_EQ(writes[i], 1) << name << " element " << i;
      }
    }
  }
}

// Active loads stay inside their tensors.
TEST(ArrangeTest, ActiveLoadsAreInBounds) {
  for (const std::string& name : CatalogNames()) {
    const CatalogEntry& e = CatalogEntryFor(name);
    const CompiledKernel k = CompileCatalog(name);
    for (const VerifyConfig& c : ConfigMatrix(e, 12, 4)) {
      const Binding b = KernelBinding(k, e, c);
      const auto shapes = ProblemShapes(e, c.dims);
      for (const IndexMap& m : k.index_maps) {
        int64_t numel = 1;
        for (int64_t s : shapes.at(m.param)) numel *= s;
        ForEachAccess(k.grid, m, b, [&](const Access& a) {
          if (!a.active) return;
          ASSERT_GE(a.offset, 0) << name << "." << m.param;
          ASSERT_LT(a.offset, numel) << name << "." << m.param;
        });
      }
    }
  }
}

TEST(ArrangeTest, ConstantMmSpecializesToFourPrograms) {
  // 4x4 matrices in 2x2 blocks: every level-0 shape is (2, 2).
  CompileOptions opts;
  for (const char* p : {"input", "other", "output"}) {
    for (int d = 0; d < 2; ++d) {
      opts.specialize[std::string(p) + "_size_" + std::to_string(d)] = 4;
    }
  }
  opts.specialize["BLOCK_SIZE_M"] = 2;
  opts.specialize["BLOCK_SIZE_N"] = 2;
  opts.specialize["BLOCK_SIZE_K"] = 2;
  const CompiledKernel k = Compile(CatalogSpec("mm"), opts);
  for (const auto& [name, t] : k.arranged) {
    EXPECT_EQ(t.Shape(0), (std::vector<SymExpr>{C(2), C(2)})) << name;
  }
  ASSERT_TRUE(k.grid.total.is_const());
  EXPECT_EQ(k.grid.total.value(), 4);
}

TEST(ArrangeTest, MismatchedConstantLevelZeroShapesAreRejected) {
  Arrangement a;
  auto dense = [](const std::string& name, int64_t n) {
    return HTensor::NewParam(name, ScalarKind::kF32, {C(n)}, {C(1)});
  };
  a.emplace_back("x", dense("x", 8).Tile({C(2)}));
  a.emplace_back("y", dense("y", 8).Tile({C(4)}));
  try {
    Validate(a);
    FAIL() << "expected a shape error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kSpec);
    const std::string msg = err.what();
    EXPECT_NE(msg.find("4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2"), std::string::npos) << msg;
  }
}

TEST(ArrangeTest, SymbolicMismatchBecomesLaunchCheck) {
  Arrangement a;
  a.emplace_back("x", HTensor::NewParam("x", 1, ScalarKind::kF32).Tile({SymExpr::Sym("B")}));
  a.emplace_back("y", HTensor::NewParam("y", 1, ScalarKind::kF32).Tile({SymExpr::Sym("B")}));
  const ValidatedArrangement v = Validate(a);
  EXPECT_FALSE(v.launch_checks.empty());
}

TEST(ArrangeTest, ConvInputArrangement) {
  // Input (1,2,5,5), filter (3,2,3,3): 3x3 windows.
  KernelSpec spec = CatalogSpec("conv2d");
  spec.base.clear();
  const Binding sizes = {
      {"input_size_0", 1},  {"input_size_1", 2},  {"input_size_2", 5},
      {"input_size_3", 5},  {"filter_size_0", 3}, {"filter_size_1", 2},
      {"filter_size_2", 3}, {"filter_size_3", 3}, {"output_size_0", 1},
      {"output_size_1", 3}, {"output_size_2", 3}, {"output_size_3", 3}};
  auto eval = [&](const std::vector<SymExpr>& s) {
    std::vector<int64_t> v;
    for (const SymExpr& e : s) v.push_back(Eval(e, sizes));
    return v;
  };
  auto input_of = [](const Arrangement& a) -> const HTensor& {
    for (const auto& [n, t] : a) {
      if (n == "input") return t;
    }
    throw std::runtime_error("no input");
  };
  KernelSpec first = spec;
  first.arrangement["input"].resize(1);
  const Arrangement tiled = EvaluateArrangement(first, nullptr, {});
  EXPECT_EQ(eval(input_of(tiled).Shape(0)), (std::vector<int64_t>{1, 1, 3, 3}));
  const Arrangement full = EvaluateArrangement(spec, nullptr, {});
  const HTensor& in = input_of(full);
  EXPECT_EQ(in.num_levels(), 1);
  EXPECT_EQ(eval(in.Shape(0)), (std::vector<int64_t>{9, 18}));
}

TEST(ArrangeTest, DecomposePidIsRowMajor) {
  const CompiledKernel k = CompileCatalog("mm");
  const Binding b = {{"input_size_0", 4}, {"output_size_1", 8},
                     {"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 2}};
  EXPECT_EQ(DecomposePid(k.grid, 0, b), (std::vector<int64_t>{0, 0}));
  EXPECT_EQ(DecomposePid(k.grid, 5, b), (std::vector<int64_t>{1, 1}));
  EXPECT_EQ(DecomposePid(k.grid, 7, b), (std::vector<int64_t>{1, 3}));
}

}  // namespace
}  // namespace tw
