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

#include "tileir.h"

#include <algorithm>
#include <set>
#include <cstring>

#include "catalog.h"
#include "error.h"

namespace tw {

const char* ArrangeOpName(ArrangeOp::Kind kind) {
  switch (kind) {
    case ArrangeOp::Kind::kTile:
      return "tile";
    case ArrangeOp::Kind::kExpand:
      return "expand";
    case ArrangeOp::Kind::kSqueeze:
      return "squeeze";
    case ArrangeOp::Kind::kPermute:
      return "permute";
    case ArrangeOp::Kind::kFlatten:
      return "flatten";
    case ArrangeOp::Kind::kRavel:
      return "ravel";
    case ArrangeOp::Kind::kInner:
      return "inner";
  }
  return "?";
}

const char* TileOpName(TileOp op) {
  switch (op) {
    case TileOp::kLoad:
      return "load";
    case TileOp::kLocal:
      return "local";
    case TileOp::kConst:
      return "const";
    case TileOp::kAdd:
      return "add";
    case TileOp::kSub:
      return "sub";
    case TileOp::kMul:
      return "mul";
    case TileOp::kDiv:
      return "div";
    case TileOp::kExp:
      return "exp";
    case TileOp::kSqrt:
      return "sqrt";
    case TileOp::kNeg:
      return "neg";
    case TileOp::kSigmoid:
      return "sigmoid";
    case TileOp::kDot:
      return "dot";
    case TileOp::kZeros:
      return "zeros";
    case TileOp::kSum:
      return "sum";
    case TileOp::kMax:
      return "max";
    case TileOp::kShapeOf:
      return "shape_of";
    case TileOp::kSymValue:
      return "sym_value";
  }
  return "?";
}

bool TileEqual(const TileExpr& a, const TileExpr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->name != b->name || a->kind != b->kind ||
      a->axis != b->axis || a->shape != b->shape || a->sym != b->sym ||
      a->fill.has_value() != b->fill.has_value() ||
      a->args.size() != b->args.size()) {
    return false;
  }
  // Bitwise comparison so that NaN/inf literals compare equal to themselves.
  auto same = [](double x, double y) {
    return std::memcmp(&x, &y, sizeof(double)) == 0;
  };
  if (!same(a->value, b->value)) return false;
  if (a->fill && !same(*a->fill, *b->fill)) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!TileEqual(a->args[i], b->args[i])) return false;
  }
  return true;
}

namespace ir {
namespace {
TileExpr Make(TileOp op, std::vector<TileExpr> args = {}) {
  auto n = std::make_shared<TileNode>();
  n->op = op;
  n->args = std::move(args);
  return n;
}
}  // namespace

TileExpr Load(std::string param, std::vector<TileExpr> nest,
              std::optional<double> fill) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kLoad;
  n->name = std::move(param);
  n->args = std::move(nest);
  n->fill = fill;
  return n;
}
TileExpr Local(std::string name) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kLocal;
  n->name = std::move(name);
  return n;
}
TileExpr Lit(double value) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kConst;
  n->value = value;
  return n;
}
TileExpr Add(TileExpr a, TileExpr b) { return Make(TileOp::kAdd, {a, b}); }
TileExpr Sub(TileExpr a, TileExpr b) { return Make(TileOp::kSub, {a, b}); }
TileExpr Mul(TileExpr a, TileExpr b) { return Make(TileOp::kMul, {a, b}); }
TileExpr Div(TileExpr a, TileExpr b) { return Make(TileOp::kDiv, {a, b}); }
TileExpr Exp(TileExpr a) { return Make(TileOp::kExp, {a}); }
TileExpr Sqrt(TileExpr a) { return Make(TileOp::kSqrt, {a}); }
TileExpr Neg(TileExpr a) { return Make(TileOp::kNeg, {a}); }
TileExpr Sigmoid(TileExpr a) { return Make(TileOp::kSigmoid, {a}); }
TileExpr Dot(TileExpr a, TileExpr b) { return Make(TileOp::kDot, {a, b}); }
TileExpr Zeros(std::vector<SymExpr> shape, ScalarKind kind) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kZeros;
  n->shape = std::move(shape);
  n->kind = kind;
  return n;
}
TileExpr Sum(TileExpr a, int axis) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kSum;
  n->args = {std::move(a)};
  n->axis = axis;
  return n;
}
TileExpr Max(TileExpr a, int axis) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kMax;
  n->args = {std::move(a)};
  n->axis = axis;
  return n;
}
TileExpr ShapeOf(std::string param, int dim) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kShapeOf;
  n->name = std::move(param);
  n->axis = dim;
  return n;
}
TileExpr SymValue(SymExpr e) {
  auto n = std::make_shared<TileNode>();
  n->op = TileOp::kSymValue;
  n->sym = std::move(e);
  return n;
}
}  // namespace ir

TileStmt TileStmt::Let(std::string local, TileExpr value) {
  TileStmt s;
  s.kind = Kind::kLet;
  s.name = std::move(local);
  s.value = std::move(value);
  return s;
}

TileStmt TileStmt::Accumulate(std::string local, TileExpr value) {
  TileStmt s;
  s.kind = Kind::kAccumulate;
  s.name = std::move(local);
  s.value = std::move(value);
  return s;
}

TileStmt TileStmt::Store(std::string param, TileExpr value,
                         std::vector<TileExpr> nest) {
  TileStmt s;
  s.kind = Kind::kStore;
  s.name = std::move(param);
  s.value = std::move(value);
  s.nest = std::move(nest);
  return s;
}

TileStmt TileStmt::For(std::string var, TileExpr extent,
                       std::vector<TileStmt> body) {
  TileStmt s;
  s.kind = Kind::kFor;
  s.name = std::move(var);
  s.value = std::move(extent);
  s.body = std::move(body);
  return s;
}

bool StmtsEqual(const std::vector<TileStmt>& a,
                const std::vector<TileStmt>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const TileStmt& x = a[i];
    const TileStmt& y = b[i];
    if (x.kind != y.kind || x.name != y.name || !TileEqual(x.value, y.value) ||
        x.nest.size() != y.nest.size() || !StmtsEqual(x.body, y.body)) {
      return false;
    }
    for (size_t k = 0; k < x.nest.size(); ++k) {
      if (!TileEqual(x.nest[k], y.nest[k])) return false;
    }
  }
  return true;
}

const ParamDecl* KernelSpec::FindParam(const std::string& param) const {
  for (const ParamDecl& p : params) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

bool SpecsEqual(const KernelSpec& a, const KernelSpec& b) {
  return a.name == b.name && a.params == b.params && a.meta == b.meta &&
         a.base == b.base && a.arrangement == b.arrangement &&
         StmtsEqual(a.application, b.application) && a.checks == b.checks;
}

const IndexMap& CompiledKernel::MapFor(const std::string& param) const {
  for (const IndexMap& m : index_maps) {
    if (m.param == param) return m;
  }
  Fail(ErrorCode::kInternal, "no index map for '" + param + "'");
}

const HTensor& CompiledKernel::TensorFor(const std::string& param) const {
  for (const auto& [name, t] : arranged) {
    if (name == param) return t;
  }
  Fail(ErrorCode::kInternal, "no arranged tensor for '" + param + "'");
}

// ---------------------------------------------------------------------------
// Arrangement evaluation.

namespace {

using TensorMap = std::map<std::string, HTensor>;

const SpecResolver& DefaultResolver() {
  static const SpecResolver resolver = [](const std::string& name) {
    return FindCatalogSpec(name);
  };
  return resolver;
}

class Arranger {
 public:
  Arranger(const KernelSpec& spec, const SpecResolver& resolver,
           const Binding& specialize, TensorMap tensors, int depth)
      : spec_(spec),
        resolver_(resolver),
        specialize_(specialize),
        tensors_(std::move(tensors)),
        depth_(depth) {}

  TensorMap Run() {
    for (const auto& [param, ops] : spec_.arrangement) {
      const ParamDecl* decl = spec_.FindParam(param);
      if (!decl) {
        Fail(ErrorCode::kSpec, "arrangement names unknown parameter '" +
                                   param + "' in kernel '" + spec_.name + "'");
      }
      if (decl->is_scalar()) {
        Fail(ErrorCode::kSpec, "scalar parameter '" + param +
                                   "' cannot be arranged");
      }
    }
    for (const ParamDecl& p : spec_.params) {
      if (!p.is_scalar()) Arrange(p.name);
    }
    if (spec_.base.empty()) return std::move(done_);
    return ApplyBase();
  }

 private:
  const HTensor& Arrange(const std::string& param) {
    if (auto it = done_.find(param); it != done_.end()) return it->second;
    if (!in_progress_.insert(param).second) {
      Fail(ErrorCode::kSpec, "cyclic shape reference through '" + param + "'");
    }
    auto src = tensors_.find(param);
    if (src == tensors_.end()) {
      Fail(ErrorCode::kSpec, "'" + param + "' is not a tensor parameter of '" +
                                 spec_.name + "'");
    }
    HTensor t = src->second;
    if (auto ops = spec_.arrangement.find(param);
        ops != spec_.arrangement.end()) {
      t = ApplyAll(ops->second, std::move(t));
    }
    in_progress_.erase(param);
    return done_.emplace(param, std::move(t)).first->second;
  }

  HTensor ApplyAll(const std::vector<ArrangeOp>& ops, HTensor t) {
    for (const ArrangeOp& op : ops) t = Apply(op, t);
    return t;
  }

  ShapeArg Resolve(const ArrangeArg& arg) {
    switch (arg.kind) {
      case ArrangeArg::Kind::kDefault:
        return std::nullopt;
      case ArrangeArg::Kind::kExpr:
        return SubstituteConstants(arg.expr, specialize_);
      case ArrangeArg::Kind::kShapeOf: {
        const HTensor& other = Arrange(arg.param);
        std::vector<SymExpr> shape = other.Shape(arg.level);
        if (arg.dim < 0 || arg.dim >= static_cast<int>(shape.size())) {
          Fail(ErrorCode::kSpec, "shape reference to dim " +
                                     std::to_string(arg.dim) + " of '" +
                                     arg.param + "' is out of range");
        }
        return shape[arg.dim];
      }
    }
    return std::nullopt;
  }

  std::vector<ShapeArg> ResolveAll(const std::vector<ArrangeArg>& args) {
    std::vector<ShapeArg> out;
    out.reserve(args.size());
    for (const ArrangeArg& a : args) out.push_back(Resolve(a));
    return out;
  }

  HTensor Apply(const ArrangeOp& op, const HTensor& t) {
    switch (op.kind) {
      case ArrangeOp::Kind::kTile: {
        std::optional<std::vector<ShapeArg>> strides;
        if (op.strides) strides = ResolveAll(*op.strides);
        return t.Tile(ResolveAll(op.shape), strides);
      }
      case ArrangeOp::Kind::kExpand:
        return t.Expand(ResolveAll(op.shape));
      case ArrangeOp::Kind::kSqueeze:
        return t.Squeeze(op.dim);
      case ArrangeOp::Kind::kPermute:
        return t.Permute(op.order);
      case ArrangeOp::Kind::kFlatten:
        return t.Flatten(op.start_dim, op.end_dim);
      case ArrangeOp::Kind::kRavel:
        return t.Ravel();
      case ArrangeOp::Kind::kInner:
        return t.WithInner(ApplyAll(op.ops, t.Inner()));
    }
    Fail(ErrorCode::kInternal, "unhandled arrangement op");
  }

  TensorMap ApplyBase() {
    if (depth_ > 8) {
      Fail(ErrorCode::kSpec, "kernel base chain too deep at '" + spec_.name + "'");
    }
    const KernelSpec* base = resolver_ ? resolver_(spec_.base) : nullptr;
    if (!base) {
      Fail(ErrorCode::kSpec, "unknown base kernel '" + spec_.base + "'");
    }
    if (base->params.size() != spec_.params.size()) {
      Fail(ErrorCode::kSpec, "kernel '" + spec_.name + "' has " +
                                 std::to_string(spec_.params.size()) +
                                 " parameters but base '" + base->name +
                                 "' takes " +
                                 std::to_string(base->params.size()));
    }
    TensorMap renamed;
    for (size_t i = 0; i < spec_.params.size(); ++i) {
      if (spec_.params[i].is_scalar() != base->params[i].is_scalar()) {
        Fail(ErrorCode::kSpec, "parameter " + std::to_string(i) + " of '" +
                                   spec_.name + "' does not match base '" +
                                   base->name + "'");
      }
      if (spec_.params[i].is_scalar()) continue;
      renamed.emplace(base->params[i].name, done_.at(spec_.params[i].name));
    }
    TensorMap result =
        Arranger(*base, resolver_, specialize_, std::move(renamed), depth_ + 1)
            .Run();
    TensorMap out;
    for (size_t i = 0; i < spec_.params.size(); ++i) {
      if (spec_.params[i].is_scalar()) continue;
      out.emplace(spec_.params[i].name, result.at(base->params[i].name));
    }
    return out;
  }

  const KernelSpec& spec_;
  const SpecResolver& resolver_;
  const Binding& specialize_;
  TensorMap tensors_;
  TensorMap done_;
  std::set<std::string> in_progress_;
  int depth_;
};

TensorMap SourceTensors(const KernelSpec& spec, const Binding& specialize) {
  TensorMap tensors;
  for (const ParamDecl& p : spec.params) {
    if (p.is_scalar()) continue;
    HTensor t = HTensor::NewParam(p.name, p.rank, p.kind);
    if (!specialize.empty()) {
      std::vector<SymExpr> sizes, strides;
      for (const SymExpr& s : t.source_sizes()) {
        sizes.push_back(Simplify(SubstituteConstants(s, specialize)));
      }
      for (const SymExpr& s : t.source_strides()) {
        strides.push_back(Simplify(SubstituteConstants(s, specialize)));
      }
      t = HTensor::NewParam(p.name, p.kind, std::move(sizes), std::move(strides));
    }
    tensors.emplace(p.name, std::move(t));
  }
  return tensors;
}

}  // namespace

Arrangement EvaluateArrangement(const KernelSpec& spec,
                                const SpecResolver& resolver,
                                const Binding& specialize) {
  const SpecResolver& r = resolver ? resolver : DefaultResolver();
  TensorMap arranged =
      Arranger(spec, r, specialize, SourceTensors(spec, specialize), 0).Run();
  Arrangement out;
  for (const ParamDecl& p : spec.params) {
    if (!p.is_scalar()) out.emplace_back(p.name, arranged.at(p.name));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Typechecking.

namespace {

std::string ShapeText(const Shape& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += ToInfix(s[i]);
  }
  return out + (s.size() == 1 ? ",)" : ")");
}

std::vector<SymExpr> NestSizes(const HTensor& t) {
  std::vector<SymExpr> out;
  for (int l = 1; l + 1 < t.num_levels(); ++l) {
    for (const SymExpr& s : t.Shape(l)) out.push_back(s);
  }
  return out;
}

const HTensor* FindTensor(const Arrangement& arranged, const std::string& p) {
  for (const auto& [name, t] : arranged) {
    if (name == p) return &t;
  }
  return nullptr;
}

Shape Broadcast(const Shape& a, const Shape& b, const char* what) {
  const size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (size_t i = 0; i < rank; ++i) {
    const SymExpr* x = i < rank - a.size() ? nullptr : &a[i - (rank - a.size())];
    const SymExpr* y = i < rank - b.size() ? nullptr : &b[i - (rank - b.size())];
    if (!x) {
      out[i] = *y;
    } else if (!y) {
      out[i] = *x;
    } else if (*x == *y || y->is_const(1)) {
      out[i] = *x;
    } else if (x->is_const(1)) {
      out[i] = *y;
    } else {
      Fail(ErrorCode::kSpec, std::string("shape mismatch in ") + what + ": " +
                                 ShapeText(a) + " vs " + ShapeText(b));
    }
  }
  return out;
}

class Checker {
 public:
  Checker(const KernelSpec& spec, const Arrangement& arranged)
      : spec_(spec), arranged_(arranged) {}

  TypeInfo Run(const std::vector<TileStmt>& application) {
    std::map<std::string, Shape> locals;
    std::set<std::string> loop_vars;
    CheckBlock(application, locals, loop_vars, /*in_loop=*/false);
    for (const ParamDecl& p : spec_.params) {
      if (p.role == Role::kOut && stores_[p.name] == 0) {
        Fail(ErrorCode::kSpec, "output '" + p.name + "' is never stored");
      }
    }
    return std::move(info_);
  }

 private:
  void CheckName(const std::string& name,
                 const std::map<std::string, Shape>& locals,
                 const std::set<std::string>& loop_vars, bool allow_local) {
    if (!IsIdentifier(name)) {
      Fail(ErrorCode::kSpec, "invalid local name '" + name + "'");
    }
    if (spec_.FindParam(name) || loop_vars.count(name) ||
        (!allow_local && locals.count(name))) {
      Fail(ErrorCode::kSpec, "name '" + name + "' is already bound");
    }
    static const char* kReserved[] = {"pid", "pid_", "lane_", "nest_", "ptr_",
                                      "tl", "triton", "torch"};
    for (const char* r : kReserved) {
      std::string_view rv(r);
      bool prefix = rv.back() == '_';
      if ((prefix && name.rfind(rv, 0) == 0) || (!prefix && name == rv)) {
        Fail(ErrorCode::kSpec, "name '" + name + "' is reserved");
      }
    }
  }

  void CheckBlock(const std::vector<TileStmt>& stmts,
                  std::map<std::string, Shape> locals,
                  std::set<std::string> loop_vars, bool in_loop) {
    for (const TileStmt& s : stmts) {
      switch (s.kind) {
        case TileStmt::Kind::kLet: {
          CheckName(s.name, locals, loop_vars, /*allow_local=*/true);
          locals[s.name] = Check(s.value, locals, loop_vars);
          break;
        }
        case TileStmt::Kind::kAccumulate: {
          auto it = locals.find(s.name);
          if (it == locals.end()) {
            Fail(ErrorCode::kSpec, "accumulate into undefined local '" +
                                       s.name + "'");
          }
          Shape v = Check(s.value, locals, loop_vars);
          if (Broadcast(it->second, v, "accumulate") != it->second) {
            Fail(ErrorCode::kSpec, "accumulate changes the shape of '" +
                                       s.name + "'");
          }
          break;
        }
        case TileStmt::Kind::kStore: {
          const ParamDecl* p = spec_.FindParam(s.name);
          if (!p) Fail(ErrorCode::kSpec, "store to unknown '" + s.name + "'");
          if (p->role != Role::kOut) {
            Fail(ErrorCode::kSpec, "input '" + s.name + "' is stored");
          }
          if (in_loop) {
            Fail(ErrorCode::kSpec, "output '" + s.name +
                                       "' is stored inside a loop");
          }
          if (++stores_[s.name] > 1) {
            Fail(ErrorCode::kSpec, "output '" + s.name +
                                       "' is stored more than once");
          }
          Shape tile = ParamTile(s.name, s.nest, locals, loop_vars);
          Shape v = Check(s.value, locals, loop_vars);
          if (Broadcast(tile, v, "store") != tile) {
            Fail(ErrorCode::kSpec, "value of shape " + ShapeText(v) +
                                       " cannot be stored to '" + s.name +
                                       "' tile " + ShapeText(tile));
          }
          break;
        }
        case TileStmt::Kind::kFor: {
          CheckName(s.name, locals, loop_vars, /*allow_local=*/false);
          CheckIndex(s.value, locals, loop_vars);
          std::set<std::string> inner_vars = loop_vars;
          inner_vars.insert(s.name);
          CheckBlock(s.body, locals, inner_vars, /*in_loop=*/true);
          // Accumulations inside the body are visible afterwards; new locals
          // are scoped to the body.
          break;
        }
      }
    }
  }

  void CheckIndex(const TileExpr& e, const std::map<std::string, Shape>& locals,
                  const std::set<std::string>& loop_vars) {
    if (!Check(e, locals, loop_vars).empty()) {
      Fail(ErrorCode::kSpec, "index expression must be a scalar");
    }
    if (e->op == TileOp::kLocal && !loop_vars.count(e->name)) {
      Fail(ErrorCode::kSpec, "index '" + e->name + "' is not a loop variable");
    }
    IndexExprOf(e, arranged_);
  }

  Shape ParamTile(const std::string& param, const std::vector<TileExpr>& nest,
                  const std::map<std::string, Shape>& locals,
                  const std::set<std::string>& loop_vars) {
    const ParamDecl* p = spec_.FindParam(param);
    if (!p) Fail(ErrorCode::kSpec, "unknown parameter '" + param + "'");
    if (p->is_scalar()) {
      if (!nest.empty()) {
        Fail(ErrorCode::kSpec, "scalar '" + param + "' cannot be indexed");
      }
      return {};
    }
    const HTensor* t = FindTensor(arranged_, param);
    const size_t expected = NestSizes(*t).size();
    if (nest.size() != expected) {
      Fail(ErrorCode::kSpec, "'" + param + "' takes " +
                                 std::to_string(expected) +
                                 " nest index(es), got " +
                                 std::to_string(nest.size()));
    }
    for (const TileExpr& i : nest) CheckIndex(i, locals, loop_vars);
    return t->Shape(t->num_levels() - 1);
  }

  Shape Check(const TileExpr& e, const std::map<std::string, Shape>& locals,
              const std::set<std::string>& loop_vars) {
    if (!e) Fail(ErrorCode::kSpec, "missing expression");
    Shape s = Infer(e, locals, loop_vars);
    info_.shapes[e.get()] = s;
    return s;
  }

  Shape Infer(const TileExpr& e, const std::map<std::string, Shape>& locals,
              const std::set<std::string>& loop_vars) {
    auto arity = [&](size_t n) {
      if (e->args.size() != n) {
        Fail(ErrorCode::kSpec, std::string(TileOpName(e->op)) + " takes " +
                                   std::to_string(n) + " operand(s)");
      }
    };
    switch (e->op) {
      case TileOp::kLoad:
        return ParamTile(e->name, e->args, locals, loop_vars);
      case TileOp::kLocal: {
        if (loop_vars.count(e->name)) return {};
        auto it = locals.find(e->name);
        if (it == locals.end()) {
          Fail(ErrorCode::kSpec, "undefined local '" + e->name + "'");
        }
        return it->second;
      }
      case TileOp::kConst:
      case TileOp::kSymValue:
        return {};
      case TileOp::kAdd:
      case TileOp::kSub:
      case TileOp::kMul:
      case TileOp::kDiv: {
        arity(2);
        Shape a = Check(e->args[0], locals, loop_vars);
        Shape b = Check(e->args[1], locals, loop_vars);
        return Broadcast(a, b, TileOpName(e->op));
      }
      case TileOp::kExp:
      case TileOp::kSqrt:
      case TileOp::kNeg:
      case TileOp::kSigmoid:
        arity(1);
        return Check(e->args[0], locals, loop_vars);
      case TileOp::kDot: {
        arity(2);
        Shape a = Check(e->args[0], locals, loop_vars);
        Shape b = Check(e->args[1], locals, loop_vars);
        if (a.size() != 2 || b.size() != 2) {
          Fail(ErrorCode::kSpec, "dot operands must be 2-D, got " +
                                     ShapeText(a) + " and " + ShapeText(b));
        }
        if (a[1] != b[0]) {
          Fail(ErrorCode::kSpec, "dot inner extents differ: " + ShapeText(a) +
                                     " x " + ShapeText(b));
        }
        return {a[0], b[1]};
      }
      case TileOp::kZeros: {
        Shape out;
        for (const SymExpr& d : e->shape) {
          SymExpr s = Simplify(d);
          if (s.is_const() && s.value() < 1) {
            Fail(ErrorCode::kSpec, "zeros with non-positive extent");
          }
          out.push_back(s);
        }
        return out;
      }
      case TileOp::kSum:
      case TileOp::kMax: {
        arity(1);
        Shape a = Check(e->args[0], locals, loop_vars);
        if (e->axis < 0 || e->axis >= static_cast<int>(a.size())) {
          Fail(ErrorCode::kSpec, std::string(TileOpName(e->op)) + " axis " +
                                     std::to_string(e->axis) +
                                     " out of range for " + ShapeText(a));
        }
        a.erase(a.begin() + e->axis);
        return a;
      }
      case TileOp::kShapeOf:
        IndexExprOf(e, arranged_);
        return {};
    }
    Fail(ErrorCode::kInternal, "unhandled tile op");
  }

  const KernelSpec& spec_;
  const Arrangement& arranged_;
  std::map<std::string, int> stores_;
  TypeInfo info_;
};

TileExpr RenameExpr(const TileExpr& e,
                    const std::map<std::string, std::string>& names) {
  auto n = std::make_shared<TileNode>(*e);
  if (e->op == TileOp::kLoad || e->op == TileOp::kShapeOf) {
    if (auto it = names.find(e->name); it != names.end()) n->name = it->second;
  }
  for (TileExpr& a : n->args) a = RenameExpr(a, names);
  return n;
}

std::vector<TileStmt> RenameStmts(const std::vector<TileStmt>& stmts,
                                  const std::map<std::string, std::string>& names) {
  std::vector<TileStmt> out = stmts;
  for (TileStmt& s : out) {
    if (s.kind == TileStmt::Kind::kStore) {
      if (auto it = names.find(s.name); it != names.end()) s.name = it->second;
    }
    if (s.value) s.value = RenameExpr(s.value, names);
    for (TileExpr& i : s.nest) i = RenameExpr(i, names);
    s.body = RenameStmts(s.body, names);
  }
  return out;
}

std::vector<TileStmt> ResolveApplication(const KernelSpec& spec,
                                         const SpecResolver& resolver,
                                         int depth) {
  if (!spec.application.empty() || spec.base.empty()) return spec.application;
  if (depth > 8) Fail(ErrorCode::kSpec, "kernel base chain too deep");
  const KernelSpec* base = resolver(spec.base);
  if (!base) Fail(ErrorCode::kSpec, "unknown base kernel '" + spec.base + "'");
  if (base->params.size() != spec.params.size()) {
    Fail(ErrorCode::kSpec, "parameter count differs from base '" + base->name + "'");
  }
  std::map<std::string, std::string> names;
  for (size_t i = 0; i < spec.params.size(); ++i) {
    names[base->params[i].name] = spec.params[i].name;
  }
  return RenameStmts(ResolveApplication(*base, resolver, depth + 1), names);
}

void RequireDeclared(const SymExpr& e, const SymbolTable& symbols,
                     const std::string& where) {
  for (const std::string& s : FreeSymbols(e)) {
    if (symbols.Contains(s) || s == kPidSymbol || s.rfind("pid_", 0) == 0 ||
        s.rfind("lane_", 0) == 0 || s.rfind("nest_", 0) == 0) {
      continue;
    }
    Fail(ErrorCode::kSpec, "undeclared symbol '" + s + "' in " + where);
  }
}

void CollectSymValues(const TileExpr& e, std::vector<SymExpr>& out) {
  if (!e) return;
  if (e->op == TileOp::kSymValue) out.push_back(e->sym);
  for (const SymExpr& s : e->shape) out.push_back(s);
  for (const TileExpr& a : e->args) CollectSymValues(a, out);
}

void CollectStmtSyms(const std::vector<TileStmt>& stmts,
                     std::vector<SymExpr>& out) {
  for (const TileStmt& s : stmts) {
    CollectSymValues(s.value, out);
    for (const TileExpr& i : s.nest) CollectSymValues(i, out);
    CollectStmtSyms(s.body, out);
  }
}

TileExpr SpecializeExpr(const TileExpr& e, const Binding& b) {
  if (!e) return e;
  auto n = std::make_shared<TileNode>(*e);
  for (SymExpr& s : n->shape) s = Simplify(SubstituteConstants(s, b));
  n->sym = Simplify(SubstituteConstants(n->sym, b));
  for (TileExpr& a : n->args) a = SpecializeExpr(a, b);
  return n;
}

void SpecializeStmts(std::vector<TileStmt>& stmts, const Binding& b) {
  for (TileStmt& s : stmts) {
    s.value = SpecializeExpr(s.value, b);
    for (TileExpr& i : s.nest) i = SpecializeExpr(i, b);
    SpecializeStmts(s.body, b);
  }
}

}  // namespace

TypeInfo Typecheck(const KernelSpec& spec,
                   const std::vector<TileStmt>& application,
                   const Arrangement& arranged) {
  return Checker(spec, arranged).Run(application);
}

SymExpr IndexExprOf(const TileExpr& e, const Arrangement& arranged) {
  switch (e->op) {
    case TileOp::kLocal:
      return SymExpr::Sym(e->name);
    case TileOp::kConst: {
      auto v = static_cast<int64_t>(e->value);
      if (static_cast<double>(v) != e->value) {
        Fail(ErrorCode::kSpec, "non-integer index constant");
      }
      return SymExpr::Const(v);
    }
    case TileOp::kSymValue:
      return e->sym;
    case TileOp::kShapeOf: {
      const HTensor* t = FindTensor(arranged, e->name);
      if (!t) {
        Fail(ErrorCode::kSpec, "shape_of unknown tensor '" + e->name + "'");
      }
      std::vector<SymExpr> nest = NestSizes(*t);
      if (e->axis < 0 || e->axis >= static_cast<int>(nest.size())) {
        Fail(ErrorCode::kSpec, "shape_of('" + e->name + "', " +
                                   std::to_string(e->axis) +
                                   ") has no such nest dim");
      }
      return nest[e->axis];
    }
    case TileOp::kAdd:
      return Simplify(IndexExprOf(e->args[0], arranged) +
                      IndexExprOf(e->args[1], arranged));
    case TileOp::kSub:
      return Simplify(IndexExprOf(e->args[0], arranged) -
                      IndexExprOf(e->args[1], arranged));
    case TileOp::kMul:
      return Simplify(IndexExprOf(e->args[0], arranged) *
                      IndexExprOf(e->args[1], arranged));
    default:
      Fail(ErrorCode::kSpec, std::string("'") + TileOpName(e->op) +
                                 "' cannot be used as an index");
  }
}

CompiledKernel Compile(const KernelSpec& spec, const CompileOptions& options) {
  const SpecResolver& resolver =
      options.resolver ? options.resolver : DefaultResolver();
  CompiledKernel out;
  out.spec = spec;

  if (!IsIdentifier(spec.name)) {
    Fail(ErrorCode::kSpec, "invalid kernel name '" + spec.name + "'");
  }
  bool has_output = false;
  for (const ParamDecl& p : spec.params) {
    if (p.rank < 0) Fail(ErrorCode::kSpec, "negative rank for '" + p.name + "'");
    if (p.is_scalar() && p.role == Role::kOut) {
      Fail(ErrorCode::kSpec, "scalar '" + p.name + "' cannot be an output");
    }
    has_output |= p.role == Role::kOut;
    out.symbols.Declare(p.name, /*is_constexpr=*/false);
    for (int i = 0; i < p.rank; ++i) {
      out.symbols.Declare(p.name + "_size_" + std::to_string(i),
                          p.shape_constexpr);
      out.symbols.Declare(p.name + "_stride_" + std::to_string(i), false);
    }
  }
  if (!has_output) {
    Fail(ErrorCode::kSpec, "kernel '" + spec.name + "' has no output");
  }
  for (const std::string& m : spec.meta) {
    for (const char* prefix : {"pid", "lane_", "nest_", "ptr_"}) {
      if (m.rfind(prefix, 0) == 0) {
        Fail(ErrorCode::kSpec, "meta-parameter name '" + m + "' is reserved");
      }
    }
    out.symbols.Declare(m, true);
  }
  if (!spec.base.empty()) {
    // Meta-parameters of the base kernel are inherited.
    const KernelSpec* base = resolver(spec.base);
    for (int depth = 0; base && depth < 8; ++depth) {
      for (const std::string& m : base->meta) {
        if (!out.symbols.Contains(m)) out.symbols.Declare(m, true);
      }
      base = base->base.empty() ? nullptr : resolver(base->base);
    }
  }

  out.arranged = EvaluateArrangement(spec, resolver, options.specialize);
  ValidatedArrangement v = Validate(out.arranged);
  out.grid = std::move(v.grid);
  out.launch_checks = std::move(v.launch_checks);
  for (const ShapeCheck& c : spec.checks) out.launch_checks.push_back(c);
  out.index_maps = Lower(out.arranged, out.grid);

  for (const auto& [name, t] : out.arranged) {
    for (int l = 0; l < t.num_levels(); ++l) {
      for (const SymExpr& s : t.Shape(l)) {
        RequireDeclared(s, out.symbols, "arrangement of '" + name + "'");
      }
    }
  }
  for (const ShapeCheck& c : out.launch_checks) {
    RequireDeclared(c.lhs, out.symbols, c.what);
    RequireDeclared(c.rhs, out.symbols, c.what);
  }

  out.application = ResolveApplication(spec, resolver, 0);
  if (!options.specialize.empty()) {
    SpecializeStmts(out.application, options.specialize);
  }
  std::vector<SymExpr> app_syms;
  CollectStmtSyms(out.application, app_syms);
  for (const SymExpr& s : app_syms) {
    RequireDeclared(s, out.symbols, "application");
  }
  out.types = Typecheck(spec, out.application, out.arranged);
  return out;
}

}  // namespace tw
