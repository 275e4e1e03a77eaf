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

// Integer symbolic expressions. Every size, stride, offset and mask bound in
// the compiler is a SymExpr; they are immutable and cheap to copy.

#ifndef TILEWRIGHT_SRC_SYMEXPR_H_
#define TILEWRIGHT_SRC_SYMEXPR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tw {

enum class ExprKind {
  kConst,
  kSym,
  kAdd,
  kSub,
  kMul,
  kFloorDiv,
  kCeilDiv,
  kMod,
  kMin,
  kMax,
  kNeg,
};

using Binding = std::map<std::string, int64_t, std::less<>>;

class SymExpr {
 public:
  // Default-constructed expressions are Const(0).
  SymExpr();

  static SymExpr Const(int64_t value);
  static SymExpr Sym(std::string name);
  static SymExpr Binary(ExprKind kind, SymExpr lhs, SymExpr rhs);
  static SymExpr Neg(SymExpr operand);

  ExprKind kind() const { return node_->kind; }
  int64_t value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  const SymExpr& lhs() const { return node_->children[0]; }
  const SymExpr& rhs() const { return node_->children[1]; }
  const SymExpr& operand() const { return node_->children[0]; }
  bool is_const() const { return kind() == ExprKind::kConst; }
  bool is_const(int64_t v) const { return is_const() && value() == v; }
  bool is_binary() const;

  // Structural equality.
  friend bool operator==(const SymExpr& a, const SymExpr& b);
  friend bool operator!=(const SymExpr& a, const SymExpr& b) {
    return !(a == b);
  }

 private:
  struct Node {
    ExprKind kind;
    int64_t value = 0;
    std::string name;
    std::vector<SymExpr> children;
  };
  explicit SymExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

SymExpr operator+(const SymExpr& a, const SymExpr& b);
SymExpr operator-(const SymExpr& a, const SymExpr& b);
SymExpr operator*(const SymExpr& a, const SymExpr& b);
SymExpr operator-(const SymExpr& a);
SymExpr FloorDiv(const SymExpr& a, const SymExpr& b);
SymExpr CeilDiv(const SymExpr& a, const SymExpr& b);
SymExpr Mod(const SymExpr& a, const SymExpr& b);
SymExpr Min(const SymExpr& a, const SymExpr& b);
SymExpr Max(const SymExpr& a, const SymExpr& b);

// Constant folding plus the identities x+0, x-0, x-x, x*1, x*0, x/1, x%1,
// min(x,x), max(x,x) and -(-x). Never changes the value under any binding
// for which the input evaluates.
SymExpr Simplify(const SymExpr& e);

// Throws Error(kInvalidArgument) for an unbound symbol or a zero divisor.
int64_t Eval(const SymExpr& e, const Binding& binding);

// Floor division and modulo with Python semantics (remainder takes the sign
// of the divisor). Throw on a zero divisor.
int64_t FloorDivInt(int64_t a, int64_t b);
int64_t CeilDivInt(int64_t a, int64_t b);
int64_t ModInt(int64_t a, int64_t b);

std::set<std::string> FreeSymbols(const SymExpr& e);
void CollectSymbols(const SymExpr& e, std::set<std::string>& out);

// Replaces symbols by expressions. Result is not simplified.
SymExpr Substitute(const SymExpr& e, const std::map<std::string, SymExpr>& m);
SymExpr SubstituteConstants(const SymExpr& e, const Binding& binding);

SymExpr Product(std::span<const SymExpr> factors);

// Serialized form: ["const", k], ["sym", name], [op, lhs, rhs], ["neg", x].
nlohmann::ordered_json ToJson(const SymExpr& e);
SymExpr SymExprFromJson(const nlohmann::ordered_json& j);

// Infix rendering with minimal parentheses. Min, max and ceil-division are
// rendered as calls whose names the caller chooses.
struct InfixStyle {
  std::string min_fn = "min";
  std::string max_fn = "max";
  std::string cdiv_fn = "cdiv";
};
std::string ToInfix(const SymExpr& e, const InfixStyle& style = {});

bool IsIdentifier(std::string_view name);

// The per-spec table of declared symbols. Constexpr symbols are meta-parameters
// that must be known when the kernel is compiled.
class SymbolTable {
 public:
  // Throws Error(kSpec) on an empty or malformed name, or a duplicate.
  SymExpr Declare(const std::string& name, bool is_constexpr);

  bool Contains(std::string_view name) const;
  bool IsConstexpr(std::string_view name) const;
  const std::vector<std::string>& names() const { return order_; }

 private:
  std::map<std::string, bool, std::less<>> constexpr_;
  std::vector<std::string> order_;
};

// A SymExpr compiled to postfix form over integer slots, for hot evaluation
// loops in the simulator. Symbols are resolved through `slots` at compile time.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const SymExpr& e, const std::map<std::string, int>& slots);

  int64_t Eval(std::span<const int64_t> values) const;

 private:
  struct Instr {
    ExprKind kind;
    int64_t arg;  // constant value or slot index
  };
  std::vector<Instr> code_;
  int max_depth_ = 0;
};

}  // namespace tw

#endif  // TILEWRIGHT_SRC_SYMEXPR_H_
