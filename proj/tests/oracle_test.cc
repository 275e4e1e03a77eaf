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

#include <chrono>
#include <cmath>
#include <random>

#include "catalog.h"
#include "error.h"
#include "oracle.h"
#include "sim.h"
#include "verify.h"

namespace tw {
namespace {

using V = std::vector<float>;

TEST(OracleTest, SmallHandCases) {
  EXPECT_EQ(OracleAdd(Tensor::FromData({2}, {1, 2}), Tensor::FromData({2}, {3, 4})).ToVector(),
            (V{4, 6}));
  EXPECT_EQ(OracleSilu(Tensor::FromData({1}, {0})).ToVector(), V{0});
  EXPECT_NEAR(OracleSilu(Tensor::FromData({1}, {1})).ToVector()[0],
              1.0 / (1.0 + std::exp(-1.0)), 1e-7);
  EXPECT_EQ(OracleSoftmax(Tensor({1, 2})).ToVector(), (V{0.5f, 0.5f}));
  EXPECT_EQ(OracleSoftmax(Tensor({2, 4}, 3.0f)).ToVector(), V(8, 0.25f));
  const Tensor ones({2, 3}, 1.0f);
  for (float v : OracleRmsNorm(ones, Tensor({1, 3}, 1.0f)).ToVector()) {
    EXPECT_NEAR(v, 1.0f, 1e-6);
  }
  // [[1,2],[3,4]] x [[5,6],[7,8]]
  const Tensor a = Tensor::FromData({2, 2}, {1, 2, 3, 4});
  const Tensor b = Tensor::FromData({2, 2}, {5, 6, 7, 8});
  EXPECT_EQ(OracleMm(a, b).ToVector(), (V{19, 22, 43, 50}));
  EXPECT_EQ(OracleAddmm(Tensor({2, 2}, 1.0f), a, b, 2.0f, 0.5f).ToVector(),
            (V{11.5f, 13, 23.5f, 27}));
  const Tensor ba = Tensor::FromData({2, 1, 1}, {2, 3});
  const Tensor bb = Tensor::FromData({2, 1, 1}, {5, 7});
  EXPECT_EQ(OracleBmm(ba, bb).ToVector(), (V{10, 21}));
}

TEST(OracleTest, ConvWithUnitFilterScales) {
  const Tensor in = Tensor::FromData({1, 1, 2, 2}, {1, 2, 3, 4});
  const Tensor f = Tensor::FromData({2, 1, 1, 1}, {2, -1});
  EXPECT_EQ(OracleConv2d(in, f).ToVector(), (V{2, 4, 6, 8, -1, -2, -3, -4}));
  // 2x2 box filter over a 3x3 ramp.
  const Tensor ramp = Tensor::FromData({1, 1, 3, 3}, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  const Tensor box({1, 1, 2, 2}, 1.0f);
  EXPECT_EQ(OracleConv2d(ramp, box).ToVector(), (V{8, 12, 20, 24}));
}

TEST(OracleTest, ShapeErrors) {
  EXPECT_THROW(OracleMm(Tensor({2, 3}), Tensor({2, 3})), Error);
  EXPECT_THROW(OracleAdd(Tensor({2}), Tensor({3})), Error);
  EXPECT_THROW(OracleConv2d(Tensor({1, 2, 3, 3}), Tensor({1, 3, 1, 1})), Error);
  try {
    OracleEval("sdpa", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfScope);
  }
}

// Direct convolution, im2col GEMM and the simulated conv2d kernel agree.
TEST(OracleTest, ImplicitGemmThreeWay) {
  const CatalogEntry& e = CatalogEntryFor("conv2d");
  const CompiledKernel k = Compile(e.spec);
  for (const VerifyConfig& c : ConfigMatrix(e, 2024, 10)) {
    TensorArgs args = MakeArgs(e, c);
    const Tensor& in = args.at("input");
    const Tensor& filter = args.at("filter");
    const int64_t r = filter.shape()[2], s = filter.shape()[3];
    const int64_t p = in.shape()[2] - r + 1, q = in.shape()[3] - s + 1;
    const Tensor direct = OracleConv2d(in, filter);
    const Tensor gemm = FoldConvOutput(OracleMm(Im2col(in, r, s), FilterMatrix(filter)),
                                       in.shape()[0], p, q);
    Launch(k, args, c.meta);
    const V d = direct.ToVector(), g = gemm.ToVector(), sim = args.at("output").ToVector();
    ASSERT_EQ(d.size(), g.size());
    ASSERT_EQ(d.size(), sim.size());
    for (size_t i = 0; i < d.size(); ++i) {
      EXPECT_NEAR(d[i], g[i], 1e-5);
      EXPECT_NEAR(d[i], sim[i], kReductionTolerance);
    }
  }
}

}  // namespace
}  // namespace tw
