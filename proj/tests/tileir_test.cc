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

#include "catalog.h"
#include "error.h"
#include "spec_json.h"
#include "tileir.h"

namespace tw {
namespace {

using Json = nlohmann::ordered_json;

Json CatalogJson(const std::string& name) {
  return SerializeSpec(CatalogSpec(name));
}

// Compiles  and returns the error code, or 0 on success.
int CompileCode(const Json& j, std::string* msg = nullptr) {
  try {
    Compile(ParseSpec(j));
    return 0;
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return static_cast<int>(e.code());
  }
}

constexpr int kSpecCode = static_cast<int>(ErrorCode::kSpec);

TEST(TileIrTest, EveryCatalogKernelCompiles) {
  for (const std::string& name : CatalogNames()) {
    const CompiledKernel k = Compile(CatalogSpec(name));
    EXPECT_EQ(k.spec.name, name);
    EXPECT_EQ(k.index_maps.size(), k.arranged.size());
    EXPECT_FALSE(k.types.shapes.empty()) << name;
  }
}

TEST(TileIrTest, OutOfScopeKernelsSaySo) {
  for (const char* name : {"sdpa", "rope"}) {
    try {
      CatalogSpec(name);
      FAIL() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kOutOfScope);
      EXPECT_NE(std::string(e.what()).find("out of scope"), std::string::npos);
    }
  }
  try {
    CatalogSpec("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(TileIrTest, StoreShapeMismatchIsRejected) {
  Json j = CatalogJson("mm");
  // Store an (M, K) input tile into the (M, N) output.
  j["application"] = Json::parse(R"([
    {"t": "store", "param": "output",
     "value": {"t": "load", "param": "input", "nest": [{"t": "const", "value": 0}]}}
  ])");
  std::string msg;
  EXPECT_EQ(CompileCode(j, &msg), kSpecCode);
  EXPECT_FALSE(msg.empty());
}

TEST(TileIrTest, DotInnerDimsMustAgree) {
  Json j = CatalogJson("mm");
  j["application"][1]["body"][0]["value"]["args"][1]["param"] = "input";
  EXPECT_EQ(CompileCode(j), kSpecCode);
}

TEST(TileIrTest, NestIndexCountMustMatch) {
  Json j = CatalogJson("add");
  j["application"][0]["value"]["args"][0]["nest"] =
      Json::parse(R"([{"t": "const", "value": 0}])");
  EXPECT_EQ(CompileCode(j), kSpecCode);
  Json mm = CatalogJson("mm");
  mm["application"][1]["body"][0]["value"]["args"][0].erase("nest");
  EXPECT_EQ(CompileCode(mm), kSpecCode);
}

TEST(TileIrTest, UnknownNamesAreRejected) {
  Json j = CatalogJson("add");
  j["application"][0]["value"]["args"][0]["param"] = "missing";
  EXPECT_EQ(CompileCode(j), kSpecCode);
  j = CatalogJson("add");
  j["application"][0]["value"] = Json::parse(R"({"t": "local", "name": "ghost"})");
  EXPECT_EQ(CompileCode(j), kSpecCode);
  j = CatalogJson("add");
  j["application"][0]["param"] = "input";  // storing to an input
  EXPECT_EQ(CompileCode(j), kSpecCode);
}

TEST(TileIrTest, IncompatibleBroadcastIsRejected) {
  Json j = CatalogJson("mm");
  j["application"][1]["body"][0]["value"]["t"] = "add";
  EXPECT_EQ(CompileCode(j), kSpecCode);
}

TEST(TileIrTest, KernelLevelErrors) {
  Json j = CatalogJson("add");
  j["meta"] = Json::array({"pid_x"});
  EXPECT_EQ(CompileCode(j), kSpecCode);
  j = CatalogJson("add");
  j["params"][2]["role"] = "in";
  EXPECT_EQ(CompileCode(j), kSpecCode);
  j = CatalogJson("add");
  j["params"][1]["name"] = "input";
  EXPECT_EQ(CompileCode(j), kSpecCode);
  j = CatalogJson("conv2d");
  j["base"] = "no_such_kernel";
  EXPECT_NE(CompileCode(j), 0);
}

TEST(TileIrTest, UndeclaredSymbolInArrangementIsRejected) {
  Json j = CatalogJson("add");
  j["arrangement"]["input"][0]["shape"] = Json::array({"UNKNOWN_BLOCK"});
  EXPECT_EQ(CompileCode(j), kSpecCode);
}

TEST(TileIrTest, ApplicationIsResolvedThroughBase) {
  const CompiledKernel k = Compile(CatalogSpec("conv2d"));
  EXPECT_TRUE(CatalogSpec("conv2d").application.empty());
  EXPECT_EQ(k.application.size(), Compile(CatalogSpec("mm")).application.size());
}

}  // namespace
}  // namespace tw
