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
#include <random>

#include "catalog.h"
#include "error.h"
#include "verify.h"

namespace tw {
namespace {

TEST(VerifyTest, FullMatrixPassesWithinBudget) {
  const auto start = std::chrono::steady_clock::now();
  int configs = 0;
  for (const std::string& name : CatalogNames()) {
    const CatalogEntry& e = CatalogEntryFor(name);
    const CompiledKernel k = Compile(e.spec);
    const std::vector<VerifyConfig> matrix = ConfigMatrix(e, 0);
    ASSERT_GE(matrix.size(), 20u);
    for (const VerifyConfig& c : matrix) {
      const VerifyResult r = VerifyKernel(k, e, c, DefaultTolerance(e));
      EXPECT_TRUE(r.coverage_ok) << name;
      EXPECT_LE(r.max_abs, DefaultTolerance(e))
          << name << " " << VerifyResultJson(r).dump();
      ++configs;
    }
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(configs, 160);
  EXPECT_LE(secs, 60.0);
}

TEST(VerifyTest, ToleranceByKernelClass) {
  EXPECT_EQ(DefaultTolerance(CatalogEntryFor("add")), 1e-5);
  EXPECT_EQ(DefaultTolerance(CatalogEntryFor("silu")), 1e-5);
  for (const char* n : {"softmax", "rms_norm", "mm", "bmm", "addmm", "conv2d"}) {
    EXPECT_EQ(DefaultTolerance(CatalogEntryFor(n)), 1e-4) << n;
  }
}

TEST(VerifyTest, ReductionsAlsoRunWithConstantRows) {
  for (const char* n : {"softmax", "rms_norm"}) {
    int constant = 0;
    for (const VerifyConfig& c : ConfigMatrix(CatalogEntryFor(n), 0)) {
      constant += c.constant_rows;
    }
    EXPECT_GT(constant, 0) << n;
  }
}

TEST(VerifyTest, AddIsExact) {
  const CatalogEntry& e = CatalogEntryFor("add");
  VerifyConfig c;
  c.dims = {{"N", 10}};
  c.meta = {{"BLOCK_SIZE", 4}};
  const VerifyResult r = VerifyKernel(Compile(e.spec), e, CompleteConfig(e, c), 0.0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.max_abs, 0.0);
  EXPECT_EQ(r.programs, 3);
}

TEST(VerifyTest, InputsAreSeededAndInRange) {
  const CatalogEntry& e = CatalogEntryFor("mm");
  VerifyConfig c = CompleteConfig(e, {});
  c.seed = 42;
  const TensorArgs a = MakeArgs(e, c), b = MakeArgs(e, c);
  EXPECT_EQ(a.at("input").ToVector(), b.at("input").ToVector());
  c.seed = 43;
  EXPECT_NE(MakeArgs(e, c).at("input").ToVector(), a.at("input").ToVector());
  std::mt19937_64 rng(1);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const float v = UniformSigned(rng);
    ASSERT_GT(v, -1.0f);
    ASSERT_LT(v, 1.0f);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000, 0.0, 0.05);
}

TEST(VerifyTest, MatrixIsDeterministic) {
  const CatalogEntry& e = CatalogEntryFor("softmax");
  const auto a = ConfigMatrix(e, 9), b = ConfigMatrix(e, 9);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].dims, b[i].dims);
    EXPECT_EQ(a[i].meta, b[i].meta);
    EXPECT_EQ(a[i].seed, b[i].seed);
  }
}

TEST(VerifyTest, MissingDimIsAnError) {
  const CatalogEntry& e = CatalogEntryFor("add");
  VerifyConfig c;
  c.dims = {{"N", 0}};
  EXPECT_THROW(MakeArgs(e, CompleteConfig(e, c)), Error);
}

}  // namespace
}  // namespace tw
