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

#ifndef TILEWRIGHT_TESTS_REF_EXPR_H_
#define TILEWRIGHT_TESTS_REF_EXPR_H_

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symexpr.h"

namespace tw::testing {

// Reference semantics kept separate from the library: a tiny tree evaluated
// with 128-bit arithmetic and Python-style division.
struct RefNode {
  char op;  // 'c' const, 's' sym, or one of + - * / ^ (ceil) % m M n (neg)
  int64_t value = 0;
  std::string name;
  std::vector<RefNode> kids;
};

inline std::optional<__int128> RefFloorDiv(__int128 a, __int128 b) {
  if (b == 0) return std::nullopt;
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::optional<__int128> RefEval(const RefNode& n, const Binding& b) {
  switch (n.op) {
    case 'c': return n.value;
    case 's': return b.at(n.name);
    case 'n': {
      auto x = RefEval(n.kids[0], b);
      if (!x) return std::nullopt;
      return -*x;
    }
    default: break;
  }
  auto x = RefEval(n.kids[0], b);
  auto y = RefEval(n.kids[1], b);
  if (!x || !y) return std::nullopt;
  switch (n.op) {
    case '+': return *x + *y;
    case '-': return *x - *y;
    case '*': return *x * *y;
    case '/': return RefFloorDiv(*x, *y);
    case '^': {
      auto q = RefFloorDiv(-*x, *y);
      if (!q) return std::nullopt;
      return -*q;
    }
    case '%': {
      auto q = RefFloorDiv(*x, *y);
      if (!q) return std::nullopt;
      return *x - *q * *y;
    }
    case 'm': return std::min(*x, *y);
    case 'M': return std::max(*x, *y);
  }
  return std::nullopt;
}

inline SymExpr ToSym(const RefNode& n) {
  switch (n.op) {
    case 'c': return SymExpr::Const(n.value);
    case 's': return SymExpr::Sym(n.name);
    case 'n': return SymExpr::Neg(ToSym(n.kids[0]));
    case '+': return SymExpr::Binary(ExprKind::kAdd, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case '-': return SymExpr::Binary(ExprKind::kSub, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case '*': return SymExpr::Binary(ExprKind::kMul, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case '/': return SymExpr::Binary(ExprKind::kFloorDiv, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case '^': return SymExpr::Binary(ExprKind::kCeilDiv, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case '%': return SymExpr::Binary(ExprKind::kMod, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case 'm': return SymExpr::Binary(ExprKind::kMin, ToSym(n.kids[0]), ToSym(n.kids[1]));
    case 'M': return SymExpr::Binary(ExprKind::kMax, ToSym(n.kids[0]), ToSym(n.kids[1]));
  }
  return SymExpr();
}

inline const char* kRefSyms[] = {"a", "b", "c"};

inline RefNode RandomTree(std::mt19937_64& rng, int depth) {
  RefNode n;
  const int pick = static_cast<int>(rng() % 12);
  if (depth == 0 || pick < 3) {
    if (rng() % 2) {
      n.op = 'c';
      n.value = static_cast<int64_t>(rng() % 7) - 2;  // includes 0 and 1
    } else {
      n.op = 's';
      n.name = kRefSyms[rng() % 3];
    }
    return n;
  }
  static const char kOps[] = {'+', '-', '*', '/', '^', '%', 'm', 'M', 'n'};
  n.op = kOps[rng() % std::size(kOps)];
  n.kids.push_back(RandomTree(rng, depth - 1));
  // Reuse the left child sometimes so x-x, min(x,x) and friends show up.
  if (n.op != 'n') {
    n.kids.push_back(rng() % 4 == 0 ? n.kids[0] : RandomTree(rng, depth - 1));
  }
  return n;
}

}  // namespace tw::testing

#endif  // TILEWRIGHT_TESTS_REF_EXPR_H_
