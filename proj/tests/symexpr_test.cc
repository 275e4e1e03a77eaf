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

#include <algorithm>
#include <optional>
#include <random>

#include "error.h"
#include "ref_expr.h"
#include "symexpr.h"

namespace tw {
namespace {

using testing::RandomTree;
using testing::RefEval;
using testing::RefNode;
using testing::ToSym;
using testing::kRefSyms;

TEST(SymExprTest, SimplifyIsSoundOnRandomExpressions) {
  std::mt19937_64 rng(20260101);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const RefNode tree = RandomTree(rng, 4);
    const SymExpr e = ToSym(tree);
    const SymExpr s = Simplify(e);
    for (int trial = 0; trial < 4; ++trial) {
      Binding b;
      for (const char* name : kRefSyms) {
        b[name] = static_cast<int64_t>(rng() % 21) - 10;
      }
      const auto want = RefEval(tree, b);
      if (!want) {
        EXPECT_THROW(Eval(e, b), Error);
        continue;
      }
      ASSERT_EQ(Eval(e, b), static_cast<int64_t>(*want)) << ToInfix(e);
      ASSERT_EQ(Eval(s, b), static_cast<int64_t>(*want))
          << ToInfix(e) << " simplified to " << ToInfix(s);
      ++checked;
    }
    EXPECT_EQ(Simplify(s), s) << "not idempotent: " << ToInfix(e);
    const std::set<std::string> before = FreeSymbols(e), after = FreeSymbols(s);
    EXPECT_TRUE(std::includes(before.begin(), before.end(), after.begin(),
                              after.end()));
  }
  EXPECT_GT(checked, 1000);
}

TEST(SymExprTest, CompiledExprMatchesEval) {
  std::mt19937_64 rng(7);
  const std::map<std::string, int> slots = {{"a", 0}, {"b", 1}, {"c", 2}};
  for (int i = 0; i < 300; ++i) {
    const RefNode tree = RandomTree(rng, 4);
    const SymExpr e = ToSym(tree);
    const CompiledExpr ce(e, slots);
    Binding b = {{"a", static_cast<int64_t>(rng() % 9) + 1},
                 {"b", static_cast<int64_t>(rng() % 9) - 4},
                 {"c", static_cast<int64_t>(rng() % 5) + 1}};
    const auto want = RefEval(tree, b);
    if (!want) continue;
    const int64_t vals[] = {b["a"], b["b"], b["c"]};
    EXPECT_EQ(ce.Eval(vals), static_cast<int64_t>(*want)) << ToInfix(e);
  }
}

TEST(SymExprTest, PythonDivisionSemantics) {
  EXPECT_EQ(FloorDivInt(7, 2), 3);
  EXPECT_EQ(FloorDivInt(-7, 2), -4);
  EXPECT_EQ(FloorDivInt(7, -2), -4);
  EXPECT_EQ(CeilDivInt(7, 2), 4);
  EXPECT_EQ(CeilDivInt(-7, 2), -3);
  EXPECT_EQ(CeilDivInt(8, 2), 4);
  EXPECT_EQ(ModInt(-7, 3), 2);
  EXPECT_EQ(ModInt(7, -3), -2);
  EXPECT_THROW(FloorDivInt(1, 0), Error);
  EXPECT_THROW(ModInt(1, 0), Error);
}

TEST(SymExprTest, FoldsIdentities) {
  const SymExpr x = SymExpr::Sym("x");
  EXPECT_EQ(Simplify(x + SymExpr::Const(0)), x);
  EXPECT_EQ(Simplify(x * SymExpr::Const(1)), x);
  EXPECT_EQ(Simplify(x * SymExpr::Const(0)), SymExpr::Const(0));
  EXPECT_EQ(Simplify(x - x), SymExpr::Const(0));
  EXPECT_EQ(Simplify(FloorDiv(x, SymExpr::Const(1))), x);
  EXPECT_EQ(Simplify(Min(x, x)), x);
  EXPECT_EQ(Simplify(-(-x)), x);
  EXPECT_EQ(Simplify(CeilDiv(SymExpr::Const(5), SymExpr::Const(2))),
            SymExpr::Const(3));
}

TEST(SymExprTest, EvalErrors) {
  const SymExpr x = SymExpr::Sym("x");
  EXPECT_THROW(Eval(x, {}), Error);
  EXPECT_THROW(Eval(FloorDiv(SymExpr::Const(1), x), {{"x", 0}}), Error);
}

TEST(SymExprTest, InfixUsesMinimalParentheses) {
  const SymExpr a = SymExpr::Sym("a"), b = SymExpr::Sym("b"),
                c = SymExpr::Sym("c");
  EXPECT_EQ(ToInfix((a + b) * c), "(a + b) * c");
  EXPECT_EQ(ToInfix(a + b * c), "a + b * c");
  EXPECT_EQ(ToInfix(a - (b - c)), "a - (b - c)");
  EXPECT_EQ(ToInfix(a - b - c), "a - b - c");
  EXPECT_EQ(ToInfix(CeilDiv(a, b)), "cdiv(a, b)");
  InfixStyle host{"min", "max", "triton.cdiv"};
  EXPECT_EQ(ToInfix(CeilDiv(a, b), host), "triton.cdiv(a, b)");
  EXPECT_EQ(ToInfix(FloorDiv(a, b + c)), "a // (b + c)");
}

TEST(SymExprTest, JsonRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const SymExpr e = ToSym(RandomTree(rng, 4));
    EXPECT_EQ(SymExprFromJson(ToJson(e)), e);
  }
  EXPECT_THROW(SymExprFromJson(nlohmann::ordered_json::parse(R"(["pow", 1, 2])")),
               Error);
}

TEST(SymExprTest, SubstituteAndFreeSymbols) {
  const SymExpr e = SymExpr::Sym("x") * SymExpr::Sym("y") + SymExpr::Const(2);
  EXPECT_EQ(FreeSymbols(e), (std::set<std::string>{"x", "y"}));
  const SymExpr s = Substitute(e, {{"x", SymExpr::Const(3)}});
  EXPECT_EQ(FreeSymbols(s), (std::set<std::string>{"y"}));
  EXPECT_EQ(Eval(s, {{"y", 4}}), 14);
  EXPECT_EQ(Eval(SubstituteConstants(e, {{"x", 2}, {"y", 5}}), {}), 12);
}

TEST(SymbolTableTest, RejectsDuplicatesAndBadNames) {
  SymbolTable t;
  t.Declare("BLOCK", true);
  EXPECT_TRUE(t.IsConstexpr("BLOCK"));
  EXPECT_THROW(t.Declare("BLOCK", true), Error);
  EXPECT_THROW(t.Declare("1x", false), Error);
  EXPECT_THROW(t.Declare("", false), Error);
}

}  // namespace
}  // namespace tw
