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

#include <cmath>
#include <set>

#include "catalog.h"
#include "error.h"
#include "oracle.h"
#include "sim.h"
#include "spec_json.h"
#include "verify.h"

namespace tw {
namespace {

CompiledKernel K(const std::string& name) { return Compile(CatalogSpec(name)); }

Binding MetaFor(const std::string& name, const Binding& dims) {
  VerifyConfig c;
  c.dims = dims;
  return CompleteConfig(CatalogEntryFor(name), c).meta;
}

TEST(SimTest, AddComputesElementwiseSum) {
  const CompiledKernel k = K("add");
  std::vector<float> a, b;
  for (int i = 0; i < 10; ++i) {
    a.push_back(static_cast<float>(i));
    b.push_back(100.0f * i);
  }
  TensorArgs args = {{"input", Tensor::FromData({10}, a)},
                     {"other", Tensor::FromData({10}, b)},
                     {"output", Tensor({10})}};
  const LaunchInfo info = Launch(k, args, {{"BLOCK_SIZE", 4}});
  EXPECT_EQ(info.programs, 3);
  const std::vector<float> out = args.at("output").ToVector();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(out[i], 101.0f * i);
}

TEST(SimTest, SoftmaxOfZerosIsUniform) {
  const CompiledKernel k = K("softmax");
  TensorArgs args = {{"input", Tensor({1, 2})}, {"output", Tensor({1, 2})}};
  Launch(k, args, MetaFor("softmax", {{"M", 1}, {"N", 2}}));
  EXPECT_EQ(args.at("output").ToVector(), (std::vector<float>{0.5f, 0.5f}));
}

TEST(SimTest, RmsNormOfOnesIsOnes) {
  const CompiledKernel k = K("rms_norm");
  TensorArgs args = {{"input", Tensor({3, 5}, 1.0f)},
                     {"weight", Tensor({1, 5}, 1.0f)},
                     {"output", Tensor({3, 5})}};
  Launch(k, args, MetaFor("rms_norm", {{"M", 3}, {"N", 5}}));
  for (float v : args.at("output").ToVector()) EXPECT_NEAR(v, 1.0f, 1e-6);
}

TEST(SimTest, IdentityTimesAIsA) {
  const CompiledKernel k = K("mm");
  const int64_t n = 5, m = 7;
  Tensor eye({n, n});
  for (int64_t i = 0; i < n; ++i) {
    const int64_t idx[] = {i, i};
    eye.At(idx) = 1.0f;
  }
  std::vector<float> data;
  for (int64_t i = 0; i < n * m; ++i) data.push_back(0.25f * static_cast<float>(i) - 3.0f);
  const Tensor a = Tensor::FromData({n, m}, data);
  TensorArgs args = {{"input", eye}, {"other", a}, {"output", Tensor({n, m})}};
  Launch(k, args, {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 3}, {"BLOCK_SIZE_K", 2}});
  EXPECT_EQ(args.at("output").ToVector(), a.ToVector());
}

TEST(SimTest, StridedViewsAreHonoured) {
  // input passed as a transposed view: output = A^T B.
  const CompiledKernel k = K("mm");
  const Tensor at = Tensor::FromData({3, 2}, {1, 2, 3, 4, 5, 6});  // A = at^T
  const Tensor a = at.Permuted({1, 0});
  const Tensor b = Tensor::FromData({3, 2}, {1, 0, 0, 1, 1, 1});
  TensorArgs args = {{"input", a}, {"other", b}, {"output", Tensor({2, 2})}};
  Launch(k, args, {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 2}, {"BLOCK_SIZE_K", 2}});
  // A = [[1,3,5],[2,4,6]].
  EXPECT_EQ(args.at("output").ToVector(), (std::vector<float>{6, 8, 8, 10}));
}

TEST(SimTest, ZeroExtentLoopLeavesAccumulatorZero) {
  const CompiledKernel k = K("mm");
  TensorArgs args = {{"input", Tensor({2, 0})},
                     {"other", Tensor({0, 3})},
                     {"output", Tensor({2, 3}, 9.0f)}};
  Launch(k, args, {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 2}, {"BLOCK_SIZE_K", 2}});
  for (float v : args.at("output").ToVector()) EXPECT_EQ(v, 0.0f);
}

TEST(SimTest, ConvDefaultMatchesOracle) {
  const CatalogEntry& e = CatalogEntryFor("conv2d");
  const VerifyConfig c = CompleteConfig(e, {});
  TensorArgs args = MakeArgs(e, c);
  EXPECT_EQ(args.at("output").shape(), (std::vector<int64_t>{1, 3, 3, 3}));
  Launch(K("conv2d"), args, c.meta);
  const Tensor want = OracleConv2d(args.at("input"), args.at("filter"));
  const auto got = args.at("output").ToVector();
  const auto ref = want.ToVector();
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-5);
}

// Outputs do not depend on program order or thread count.
TEST(SimTest, ProgramOrderDoesNotMatter) {
  for (const std::string& name : CatalogNames()) {
    const CatalogEntry& e = CatalogEntryFor(name);
    const CompiledKernel k = K(name);
    const std::string out = OutputParam(k.spec);
    for (const VerifyConfig& c : ConfigMatrix(e, 5, 3)) {
      std::vector<std::string> encoded;
      for (int variant = 0; variant < 4; ++variant) {
        TensorArgs args = MakeArgs(e, c);
        LaunchOptions o;
        o.reverse = variant == 1;
        o.threads = variant == 2 ? 3 : 1;
        Launch(k, args, c.meta, o);
        encoded.push_back(EncodeTwt(args.at(out)));
      }
      for (size_t v = 1; v < encoded.size(); ++v) {
        EXPECT_EQ(encoded[v], encoded[0]) << name << " variant " << v;
      }
    }
  }
}

TEST(SimTest, StoreHookSeesEveryOutputOnce) {
  const CompiledKernel k = K("add");
  TensorArgs args = {{"input", Tensor({10})}, {"other", Tensor({10})},
                     {"output", Tensor({10})}};
  std::multiset<int64_t> offsets;
  std::set<int64_t> pids;
  LaunchOptions o;
  o.on_store = [&](const std::string& p, int64_t off, int64_t pid) {
    EXPECT_EQ(p, "output");
    offsets.insert(off);
    pids.insert(pid);
  };
  Launch(k, args, {{"BLOCK_SIZE", 4}}, o);
  EXPECT_EQ(offsets.size(), 10u);
  for (int64_t i = 0; i < 10; ++i) EXPECT_EQ(offsets.count(i), 1u);
  EXPECT_EQ(pids, (std::set<int64_t>{0, 1, 2}));
}

int LaunchCode(const CompiledKernel& k, TensorArgs args, const Binding& meta) {
  try {
    Launch(k, args, meta);
    return 0;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLaunch) << e.what();
    return static_cast<int>(e.code());
  }
}

TEST(SimTest, LaunchErrors) {
  const CompiledKernel k = K("mm");
  const Binding meta = {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 2}, {"BLOCK_SIZE_K", 2}};
  auto args = [] {
    return TensorArgs{{"input", Tensor({4, 6})}, {"other", Tensor({6, 8})},
                      {"output", Tensor({4, 8})}};
  };
  EXPECT_EQ(LaunchCode(k, args(), meta), 0);
  TensorArgs a = args();
  a.erase("other");
  EXPECT_NE(LaunchCode(k, a, meta), 0);
  a = args();
  a["extra"] = Tensor({1});
  EXPECT_NE(LaunchCode(k, a, meta), 0);
  a = args();
  a["other"] = Tensor({6});
  EXPECT_NE(LaunchCode(k, a, meta), 0);
  a = args();
  a["other"] = Tensor({5, 8});  // inner dims differ
  EXPECT_NE(LaunchCode(k, a, meta), 0);
  EXPECT_NE(LaunchCode(k, args(), {{"BLOCK_SIZE_M", 2}, {"BLOCK_SIZE_N", 2}}), 0);
  EXPECT_NE(LaunchCode(k, args(), {{"BLOCK_SIZE_M", 0}, {"BLOCK_SIZE_N", 2},
                                   {"BLOCK_SIZE_K", 2}}), 0);
  Binding extra = meta;
  extra["BLOCK_SIZE_Q"] = 2;
  EXPECT_NE(LaunchCode(k, args(), extra), 0);
}

TEST(SimTest, RequiredMetaListsConstexprSymbols) {
  EXPECT_EQ(RequiredMeta(K("add")), std::vector<std::string>{"BLOCK_SIZE"});
  EXPECT_EQ(RequiredMeta(K("conv2d")).size(), 3u);
}

}  // namespace
}  // namespace tw
