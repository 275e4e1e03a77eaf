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

#include "symexpr.h"

#include <algorithm>
#include <cctype>

#include "error.h"

namespace tw {
namespace {

struct OpName {
  ExprKind kind;
  const char* name;
};

constexpr OpName kOpNames[] = {
    {ExprKind::kConst, "const"},       {ExprKind::kSym, "sym"},
    {ExprKind::kAdd, "add"},           {ExprKind::kSub, "sub"},
    {ExprKind::kMul, "mul"},           {ExprKind::kFloorDiv, "floordiv"},
    {ExprKind::kCeilDiv, "ceildiv"},   {ExprKind::kMod, "mod"},
    {ExprKind::kMin, "min"},           {ExprKind::kMax, "max"},
    {ExprKind::kNeg, "neg"},
};

const char* KindName(ExprKind kind) {
  for (const auto& op : kOpNames) {
    if (op.kind == kind) return op.name;
  }
  return "?";
}

int64_t ApplyBinary(ExprKind kind, int64_t a, int64_t b) {
  switch (kind) {
    case ExprKind::kAdd:
      return a + b;
    case ExprKind::kSub:
      return a - b;
    case ExprKind::kMul:
      return a * b;
    case ExprKind::kFloorDiv:
      return FloorDivInt(a, b);
    case ExprKind::kCeilDiv:
      return CeilDivInt(a, b);
    case ExprKind::kMod:
      return ModInt(a, b);
    case ExprKind::kMin:
      return std::min(a, b);
    case ExprKind::kMax:
      return std::max(a, b);
    default:
      Fail(ErrorCode::kInternal, "not a binary expression kind");
  }
}

bool IsDivision(ExprKind kind) {
  return kind == ExprKind::kFloorDiv || kind == ExprKind::kCeilDiv ||
         kind == ExprKind::kMod;
}

}  // namespace

SymExpr::SymExpr() : SymExpr(Const(0)) {}

SymExpr SymExpr::Const(int64_t value) {
  auto node = std::make_shared<Node>();
  node->kind = ExprKind::kConst;
  node->value = value;
  return SymExpr(std::move(node));
}

SymExpr SymExpr::Sym(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = ExprKind::kSym;
  node->name = std::move(name);
  return SymExpr(std::move(node));
}

SymExpr SymExpr::Binary(ExprKind kind, SymExpr lhs, SymExpr rhs) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = {std::move(lhs), std::move(rhs)};
  return SymExpr(std::move(node));
}

SymExpr SymExpr::Neg(SymExpr operand) {
  auto node = std::make_shared<Node>();
  node->kind = ExprKind::kNeg;
  node->children = {std::move(operand)};
  return SymExpr(std::move(node));
}

bool SymExpr::is_binary() const {
  return kind() != ExprKind::kConst && kind() != ExprKind::kSym &&
         kind() != ExprKind::kNeg;
}

bool operator==(const SymExpr& a, const SymExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kConst:
      return a.value() == b.value();
    case ExprKind::kSym:
      return a.name() == b.name();
    default:
      return a.node_->children == b.node_->children;
  }
}

SymExpr operator+(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kAdd, a, b);
}
SymExpr operator-(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kSub, a, b);
}
SymExpr operator*(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kMul, a, b);
}
SymExpr operator-(const SymExpr& a) { return SymExpr::Neg(a); }
SymExpr FloorDiv(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kFloorDiv, a, b);
}
SymExpr CeilDiv(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kCeilDiv, a, b);
}
SymExpr Mod(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kMod, a, b);
}
SymExpr Min(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kMin, a, b);
}
SymExpr Max(const SymExpr& a, const SymExpr& b) {
  return SymExpr::Binary(ExprKind::kMax, a, b);
}

int64_t FloorDivInt(int64_t a, int64_t b) {
  if (b == 0) Fail(ErrorCode::kInvalidArgument, "division by zero");
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t CeilDivInt(int64_t a, int64_t b) { return -FloorDivInt(-a, b); }

int64_t ModInt(int64_t a, int64_t b) {
  if (b == 0) Fail(ErrorCode::kInvalidArgument, "modulo by zero");
  return a - FloorDivInt(a, b) * b;
}

SymExpr Simplify(const SymExpr& e) {
  switch (e.kind()) {
    case ExprKind::kConst:
    case ExprKind::kSym:
      return e;
    case ExprKind::kNeg: {
      SymExpr x = Simplify(e.operand());
      if (x.is_const()) return SymExpr::Const(-x.value());
      if (x.kind() == ExprKind::kNeg) return x.operand();
      return SymExpr::Neg(x);
    }
    default:
      break;
  }
  SymExpr a = Simplify(e.lhs());
  SymExpr b = Simplify(e.rhs());
  ExprKind k = e.kind();
  if (a.is_const() && b.is_const() && !(IsDivision(k) && b.value() == 0)) {
    return SymExpr::Const(ApplyBinary(k, a.value(), b.value()));
  }
  switch (k) {
    case ExprKind::kAdd:
      if (a.is_const(0)) return b;
      if (b.is_const(0)) return a;
      break;
    case ExprKind::kSub:
      if (b.is_const(0)) return a;
      if (a == b) return SymExpr::Const(0);
      break;
    case ExprKind::kMul:
      if (a.is_const(0) || b.is_const(0)) return SymExpr::Const(0);
      if (a.is_const(1)) return b;
      if (b.is_const(1)) return a;
      break;
    case ExprKind::kFloorDiv:
    case ExprKind::kCeilDiv:
      if (b.is_const(1)) return a;
      break;
    case ExprKind::kMod:
      if (b.is_const(1)) return SymExpr::Const(0);
      break;
    case ExprKind::kMin:
    case ExprKind::kMax:
      if (a == b) return a;
      break;
    default:
      break;
  }
  return SymExpr::Binary(k, std::move(a), std::move(b));
}

int64_t Eval(const SymExpr& e, const Binding& binding) {
  switch (e.kind()) {
    case ExprKind::kConst:
      return e.value();
    case ExprKind::kSym: {
      auto it = binding.find(e.name());
      if (it == binding.end()) {
        Fail(ErrorCode::kInvalidArgument, "unbound symbol '" + e.name() + "'");
      }
      return it->second;
    }
    case ExprKind::kNeg:
      return -Eval(e.operand(), binding);
    default:
      return ApplyBinary(e.kind(), Eval(e.lhs(), binding),
                         Eval(e.rhs(), binding));
  }
}

void CollectSymbols(const SymExpr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::kConst:
      return;
    case ExprKind::kSym:
      out.insert(e.name());
      return;
    case ExprKind::kNeg:
      CollectSymbols(e.operand(), out);
      return;
    default:
      CollectSymbols(e.lhs(), out);
      CollectSymbols(e.rhs(), out);
  }
}

std::set<std::string> FreeSymbols(const SymExpr& e) {
  std::set<std::string> out;
  CollectSymbols(e, out);
  return out;
}

SymExpr Substitute(const SymExpr& e, const std::map<std::string, SymExpr>& m) {
  switch (e.kind()) {
    case ExprKind::kConst:
      return e;
    case ExprKind::kSym: {
      auto it = m.find(e.name());
      return it == m.end() ? e : it->second;
    }
    case ExprKind::kNeg:
      return SymExpr::Neg(Substitute(e.operand(), m));
    default:
      return SymExpr::Binary(e.kind(), Substitute(e.lhs(), m),
                             Substitute(e.rhs(), m));
  }
}

SymExpr SubstituteConstants(const SymExpr& e, const Binding& binding) {
  std::map<std::string, SymExpr> m;
  for (const auto& [name, value] : binding) m.emplace(name, SymExpr::Const(value));
  return Substitute(e, m);
}

SymExpr Product(std::span<const SymExpr> factors) {
  if (factors.empty()) return SymExpr::Const(1);
  SymExpr out = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) out = out * factors[i];
  return Simplify(out);
}

nlohmann::ordered_json ToJson(const SymExpr& e) {
  using J = nlohmann::ordered_json;
  switch (e.kind()) {
    case ExprKind::kConst:
      return J::array({"const", e.value()});
    case ExprKind::kSym:
      return J::array({"sym", e.name()});
    case ExprKind::kNeg:
      return J::array({"neg", ToJson(e.operand())});
    default:
      return J::array({KindName(e.kind()), ToJson(e.lhs()), ToJson(e.rhs())});
  }
}

SymExpr SymExprFromJson(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) {
    Fail(ErrorCode::kSpec, "expression must be a tagged array, got " + j.dump());
  }
  const std::string tag = j[0].get<std::string>();
  auto expect_arity = [&](size_t n) {
    if (j.size() != n + 1) {
      Fail(ErrorCode::kSpec, "expression '" + tag + "' takes " +
                                 std::to_string(n) + " operand(s)");
    }
  };
  if (tag == "const") {
    expect_arity(1);
    if (!j[1].is_number_integer()) {
      Fail(ErrorCode::kSpec, "const operand must be an integer");
    }
    return SymExpr::Const(j[1].get<int64_t>());
  }
  if (tag == "sym") {
    expect_arity(1);
    if (!j[1].is_string() || !IsIdentifier(j[1].get<std::string>())) {
      Fail(ErrorCode::kSpec, "sym operand must be an identifier");
    }
    return SymExpr::Sym(j[1].get<std::string>());
  }
  if (tag == "neg") {
    expect_arity(1);
    return SymExpr::Neg(SymExprFromJson(j[1]));
  }
  for (const auto& op : kOpNames) {
    if (tag == op.name && op.kind != ExprKind::kConst &&
        op.kind != ExprKind::kSym && op.kind != ExprKind::kNeg) {
      expect_arity(2);
      return SymExpr::Binary(op.kind, SymExprFromJson(j[1]),
                             SymExprFromJson(j[2]));
    }
  }
  Fail(ErrorCode::kSpec, "unknown expression operator '" + tag + "'");
}

namespace {

// Python operator precedence: + - bind loosest, then * // %, then unary -.
int Precedence(const SymExpr& e) {
  switch (e.kind()) {
    case ExprKind::kAdd:
    case ExprKind::kSub:
      return 1;
    case ExprKind::kMul:
    case ExprKind::kFloorDiv:
    case ExprKind::kMod:
      return 2;
    case ExprKind::kNeg:
      return 3;
    case ExprKind::kConst:
      return e.value() < 0 ? 3 : 4;
    default:
      return 4;
  }
}

std::string Render(const SymExpr& e, const InfixStyle& style);

std::string Wrap(const SymExpr& e, bool parens, const InfixStyle& style) {
  std::string s = Render(e, style);
  return parens ? "(" + s + ")" : s;
}

std::string Render(const SymExpr& e, const InfixStyle& style) {
  switch (e.kind()) {
    case ExprKind::kConst:
      return std::to_string(e.value());
    case ExprKind::kSym:
      return e.name();
    case ExprKind::kNeg:
      return "-" + Wrap(e.operand(), Precedence(e.operand()) < 3, style);
    case ExprKind::kMin:
      return style.min_fn + "(" + Render(e.lhs(), style) + ", " +
             Render(e.rhs(), style) + ")";
    case ExprKind::kMax:
      return style.max_fn + "(" + Render(e.lhs(), style) + ", " +
             Render(e.rhs(), style) + ")";
    case ExprKind::kCeilDiv:
      return style.cdiv_fn + "(" + Render(e.lhs(), style) + ", " +
             Render(e.rhs(), style) + ")";
    default:
      break;
  }
  const char* op = "";
  switch (e.kind()) {
    case ExprKind::kAdd:
      op = " + ";
      break;
    case ExprKind::kSub:
      op = " - ";
      break;
    case ExprKind::kMul:
      op = " * ";
      break;
    case ExprKind::kFloorDiv:
      op = " // ";
      break;
    case ExprKind::kMod:
      op = " % ";
      break;
    default:
      break;
  }
  int p = Precedence(e);
  // Left-associative: the right operand needs parentheses at equal
  // precedence unless the operator is associative with itself (+ and *).
  bool right_assoc_ok = e.kind() == ExprKind::kAdd ||
                        (e.kind() == ExprKind::kMul &&
                         e.rhs().kind() == ExprKind::kMul);
  bool lp = Precedence(e.lhs()) < p;
  bool rp = Precedence(e.rhs()) < p ||
            (Precedence(e.rhs()) == p && !right_assoc_ok);
  return Wrap(e.lhs(), lp, style) + op + Wrap(e.rhs(), rp, style);
}

}  // namespace

std::string ToInfix(const SymExpr& e, const InfixStyle& style) {
  return Render(e, style);
}

bool IsIdentifier(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
    return false;
  }
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

SymExpr SymbolTable::Declare(const std::string& name, bool is_constexpr) {
  if (!IsIdentifier(name)) {
    Fail(ErrorCode::kSpec, "invalid symbol name '" + name + "'");
  }
  if (!constexpr_.emplace(name, is_constexpr).second) {
    Fail(ErrorCode::kSpec, "duplicate symbol '" + name + "'");
  }
  order_.push_back(name);
  return SymExpr::Sym(name);
}

bool SymbolTable::Contains(std::string_view name) const {
  return constexpr_.find(name) != constexpr_.end();
}

bool SymbolTable::IsConstexpr(std::string_view name) const {
  auto it = constexpr_.find(name);
  return it != constexpr_.end() && it->second;
}

namespace {

void CompileInto(const SymExpr& e, const std::map<std::string, int>& slots,
                 std::vector<std::pair<ExprKind, int64_t>>& code) {
  switch (e.kind()) {
    case ExprKind::kConst:
      code.emplace_back(ExprKind::kConst, e.value());
      return;
    case ExprKind::kSym: {
      auto it = slots.find(e.name());
      if (it == slots.end()) {
        Fail(ErrorCode::kInvalidArgument, "unbound symbol '" + e.name() + "'");
      }
      code.emplace_back(ExprKind::kSym, it->second);
      return;
    }
    case ExprKind::kNeg:
      CompileInto(e.operand(), slots, code);
      code.emplace_back(ExprKind::kNeg, 0);
      return;
    default:
      CompileInto(e.lhs(), slots, code);
      CompileInto(e.rhs(), slots, code);
      code.emplace_back(e.kind(), 0);
  }
}

}  // namespace

CompiledExpr::CompiledExpr(const SymExpr& e,
                           const std::map<std::string, int>& slots) {
  std::vector<std::pair<ExprKind, int64_t>> code;
  CompileInto(e, slots, code);
  int depth = 0;
  for (const auto& [kind, arg] : code) {
    code_.push_back({kind, arg});
    if (kind == ExprKind::kConst || kind == ExprKind::kSym) {
      max_depth_ = std::max(max_depth_, ++depth);
    } else if (kind != ExprKind::kNeg) {
      --depth;
    }
  }
}

int64_t CompiledExpr::Eval(std::span<const int64_t> values) const {
  // Expression trees here are shallow; a fixed stack covers them and falls
  // back to the heap otherwise.
  int64_t small[64];
  std::vector<int64_t> large;
  int64_t* stack = small;
  if (max_depth_ > 64) {
    large.resize(max_depth_);
    stack = large.data();
  }
  if (code_.empty()) return 0;
  int top = 0;
  for (const Instr& in : code_) {
    switch (in.kind) {
      case ExprKind::kConst:
        stack[top++] = in.arg;
        break;
      case ExprKind::kSym:
        stack[top++] = values[in.arg];
        break;
      case ExprKind::kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
      default: {
        int64_t b = stack[--top];
        stack[top - 1] = ApplyBinary(in.kind, stack[top - 1], b);
      }
    }
  }
  return stack[0];
}

}  // namespace tw
