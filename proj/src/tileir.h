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

// Kernel specifications: parameters, the arrangement program, and the
// tile-level application IR executed by each program.

#ifndef TILEWRIGHT_SRC_TILEIR_H_
#define TILEWRIGHT_SRC_TILEIR_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arrange.h"
#include "htensor.h"
#include "symexpr.h"

namespace tw {

// ---------------------------------------------------------------------------
// Arrangement program.

// A meta-operation argument: -1 (FULL/KEEP/DEFAULT), an expression, or the
// size of a dim of another parameter's arranged tensor.
struct ArrangeArg {
  enum class Kind { kDefault, kExpr, kShapeOf };
  Kind kind = Kind::kDefault;
  SymExpr expr;
  std::string param;
  int level = 0;
  int dim = 0;

  static ArrangeArg Default() { return {}; }
  static ArrangeArg Expr(SymExpr e) {
    ArrangeArg a;
    a.kind = Kind::kExpr;
    a.expr = std::move(e);
    return a;
  }
  static ArrangeArg ShapeOf(std::string param, int level, int dim) {
    return {Kind::kShapeOf, SymExpr(), std::move(param), level, dim};
  }
  friend bool operator==(const ArrangeArg&, const ArrangeArg&) = default;
};

struct ArrangeOp {
  enum class Kind { kTile, kExpand, kSqueeze, kPermute, kFlatten, kRavel, kInner };
  Kind kind = Kind::kTile;
  std::vector<ArrangeArg> shape;                   // tile, expand
  std::optional<std::vector<ArrangeArg>> strides;  // tile
  int dim = 0;                                     // squeeze
  std::vector<int> order;                          // permute
  int start_dim = 0;                               // flatten
  std::optional<int> end_dim;                      // flatten, exclusive
  std::vector<ArrangeOp> ops;                      // inner: applied to dtype

  friend bool operator==(const ArrangeOp&, const ArrangeOp&) = default;
};

const char* ArrangeOpName(ArrangeOp::Kind kind);

// ---------------------------------------------------------------------------
// Application IR.

enum class TileOp {
  kLoad,      // name = param, args = nest indices, fill = masked-lane value
  kLocal,     // name
  kConst,     // value
  kAdd,
  kSub,
  kMul,
  kDiv,
  kExp,
  kSqrt,
  kNeg,
  kSigmoid,
  kDot,       // 2-D tile matmul
  kZeros,     // shape, kind
  kSum,       // axis; the reduced axis is dropped
  kMax,
  kShapeOf,   // name = param, axis = nest dim
  kSymValue,  // sym: scalar from a symbolic expression over spec symbols
};

const char* TileOpName(TileOp op);

struct TileNode;
using TileExpr = std::shared_ptr<const TileNode>;

struct TileNode {
  TileOp op = TileOp::kConst;
  std::string name;
  double value = 0.0;
  std::optional<double> fill;
  std::vector<TileExpr> args;
  std::vector<SymExpr> shape;
  ScalarKind kind = ScalarKind::kF32;
  int axis = 0;
  SymExpr sym;
};

bool TileEqual(const TileExpr& a, const TileExpr& b);

namespace ir {
TileExpr Load(std::string param, std::vector<TileExpr> nest = {},
              std::optional<double> fill = {});
TileExpr Local(std::string name);
TileExpr Lit(double value);
TileExpr Add(TileExpr a, TileExpr b);
TileExpr Sub(TileExpr a, TileExpr b);
TileExpr Mul(TileExpr a, TileExpr b);
TileExpr Div(TileExpr a, TileExpr b);
TileExpr Exp(TileExpr a);
TileExpr Sqrt(TileExpr a);
TileExpr Neg(TileExpr a);
TileExpr Sigmoid(TileExpr a);
TileExpr Dot(TileExpr a, TileExpr b);
TileExpr Zeros(std::vector<SymExpr> shape, ScalarKind kind = ScalarKind::kF32);
TileExpr Sum(TileExpr a, int axis);
TileExpr Max(TileExpr a, int axis);
TileExpr ShapeOf(std::string param, int dim);
TileExpr SymValue(SymExpr e);
}  // namespace ir

struct TileStmt {
  enum class Kind { kLet, kAccumulate, kStore, kFor };
  Kind kind = Kind::kLet;
  std::string name;  // local, param, or loop variable
  std::vector<TileExpr> nest;  // store
  TileExpr value;    // let, accumulate, store; loop extent for kFor
  std::vector<TileStmt> body;

  static TileStmt Let(std::string local, TileExpr value);
  static TileStmt Accumulate(std::string local, TileExpr value);
  static TileStmt Store(std::string param, TileExpr value,
                        std::vector<TileExpr> nest = {});
  static TileStmt For(std::string var, TileExpr extent,
                      std::vector<TileStmt> body);
};

bool StmtsEqual(const std::vector<TileStmt>& a, const std::vector<TileStmt>& b);

// ---------------------------------------------------------------------------
// Kernel specification.

enum class Role { kIn, kOut };

struct ParamDecl {
  std::string name;
  int rank = 1;  // 0 declares a runtime scalar argument
  ScalarKind kind = ScalarKind::kF32;
  Role role = Role::kIn;
  bool shape_constexpr = false;

  bool is_scalar() const { return rank == 0; }
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct KernelSpec {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<std::string> meta;  // constexpr symbols
  // When set, the named kernel's arrangement is applied after this spec's
  // per-parameter ops, with parameters matched by position; an empty
  // application reuses the base kernel's application.
  std::string base;
  std::map<std::string, std::vector<ArrangeOp>> arrangement;
  std::vector<TileStmt> application;
  std::vector<ShapeCheck> checks;  // extra launch-time equalities

  const ParamDecl* FindParam(const std::string& name) const;
};

bool SpecsEqual(const KernelSpec& a, const KernelSpec& b);

// Looks up kernels referenced through KernelSpec::base.
using SpecResolver = std::function<const KernelSpec*(const std::string&)>;

// Shapes annotated by the typechecker, keyed by node.
using Shape = std::vector<SymExpr>;
struct TypeInfo {
  std::map<const TileNode*, Shape> shapes;
};

// A spec after arrangement evaluation, validation, lowering and typechecking.
// This is what the simulator and the emitter consume.
struct CompiledKernel {
  KernelSpec spec;
  SymbolTable symbols;
  Arrangement arranged;  // tensor parameters only, in declaration order
  GridSpec grid;
  std::vector<ShapeCheck> launch_checks;
  std::vector<IndexMap> index_maps;  // parallel to `arranged`
  std::vector<TileStmt> application;  // resolved (base application renamed)
  TypeInfo types;

  const IndexMap& MapFor(const std::string& param) const;
  const HTensor& TensorFor(const std::string& param) const;
};

struct CompileOptions {
  SpecResolver resolver;  // defaults to the built-in catalog
  // Symbols replaced by constants before arranging (used to exercise the
  // purely structural validation path).
  Binding specialize;
};

CompiledKernel Compile(const KernelSpec& spec, const CompileOptions& options = {});

// Evaluates the arrangement program; parameters in declaration order.
Arrangement EvaluateArrangement(const KernelSpec& spec,
                                const SpecResolver& resolver,
                                const Binding& specialize = {});

// Checks and annotates the application against an arrangement. Throws
// Error(kSpec) with the offending construct on failure.
TypeInfo Typecheck(const KernelSpec& spec,
                   const std::vector<TileStmt>& application,
                   const Arrangement& arranged);

// Integer index expression for a nest index or loop extent: loop variables,
// integer constants, ShapeOf and SymValue nodes.
SymExpr IndexExprOf(const TileExpr& e, const Arrangement& arranged);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_TILEIR_H_
