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

#include "emit.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "error.h"
#include "spec_json.h"

namespace tw {
namespace {

const InfixStyle kKernelStyle{"tl.minimum", "tl.maximum", "tl.cdiv"};
const InfixStyle kHostStyle{"min", "max", "triton.cdiv"};

std::string LaneName(const std::string& param, int j) {
  return param + "_" + LaneVar(j);
}

std::string FloatLiteral(double v) {
  if (std::isnan(v)) return "float(\"nan\")";
  if (std::isinf(v)) return v > 0 ? "float(\"inf\")" : "float(\"-inf\")";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

const char* DtypeName(ScalarKind k) {
  switch (k) {
    case ScalarKind::kF32:
      return "tl.float32";
    case ScalarKind::kF16:
      return "tl.float16";
    case ScalarKind::kI32:
      return "tl.int32";
  }
  return "tl.float32";
}

std::string ShapeTuple(const std::vector<std::string>& dims) {
  std::string s = "(";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += dims[i];
  }
  return s + (dims.size() == 1 ? ",)" : ")");
}

class Emitter {
 public:
  explicit Emitter(const CompiledKernel& k) : k_(k) {}

  EmittedKernel Run() {
    out_.kernel_name = k_.spec.name + "_kernel";
    out_.grid_name = k_.spec.name + "_grid";
    out_.launcher_name = k_.spec.name;
    BuildArguments();

    std::ostringstream src;
    src << "# Generated by tilewright from kernel \"" << k_.spec.name
        << "\". Do not edit.\n\n"
        << "import torch\n"
        << "import triton\n"
        << "import triton.language as tl\n\n\n";
    EmitKernel(src);
    src << "\n\n";
    EmitGrid(src);
    src << "\n\n";
    EmitLauncher(src);
    out_.source = src.str();
    return std::move(out_);
  }

 private:
  // ---------------------------------------------------------------------
  // Signature.

  void BuildArguments() {
    using M = KernelArgument::Meaning;
    for (const ParamDecl& p : k_.spec.params) {
      if (p.is_scalar()) {
        out_.arguments.push_back({p.name, M::kScalar, p.name, 0, false});
        continue;
      }
      out_.arguments.push_back({"ptr_" + p.name, M::kPointer, p.name, 0, false});
      for (int i = 0; i < p.rank; ++i) {
        out_.arguments.push_back({p.name + "_size_" + std::to_string(i),
                                  M::kSize, p.name, i, p.shape_constexpr});
      }
      for (int i = 0; i < p.rank; ++i) {
        out_.arguments.push_back({p.name + "_stride_" + std::to_string(i),
                                  M::kStride, p.name, i, false});
      }
    }
    for (const std::string& m : MetaNames()) {
      out_.arguments.push_back({m, M::kMeta, "", 0, true});
    }
    for (const ParamDecl& p : k_.spec.params) {
      out_.launcher_arguments.push_back(p.name);
    }
    for (const std::string& m : MetaNames()) out_.launcher_arguments.push_back(m);
  }

  std::vector<std::string> MetaNames() const {
    std::vector<std::string> out;
    for (const std::string& name : k_.symbols.names()) {
      if (!k_.symbols.IsConstexpr(name)) continue;
      if (name.find("_size_") != std::string::npos && IsSizeSymbol(name)) continue;
      out.push_back(name);
    }
    return out;
  }

  bool IsSizeSymbol(const std::string& name) const {
    for (const ParamDecl& p : k_.spec.params) {
      for (int i = 0; i < p.rank; ++i) {
        if (name == p.name + "_size_" + std::to_string(i)) return true;
      }
    }
    return false;
  }

  // ---------------------------------------------------------------------
  // Kernel.

  std::string Kernel(const SymExpr& e) {
    out_.kernel_expressions.push_back(e);
    return ToInfix(e, kKernelStyle);
  }

  void Define(std::ostream& os, const std::string& indent,
              const std::string& name, const std::string& value) {
    out_.kernel_defined.insert(name);
    os << indent << name << " = " << value << "\n";
  }

  void EmitKernel(std::ostream& os) {
    os << "@triton.jit\n" << "def " << out_.kernel_name << "(\n";
    for (const KernelArgument& a : out_.arguments) {
      os << "    " << a.name << (a.constexpr_ ? ": tl.constexpr" : "") << ",\n";
    }
    os << "):\n";
    const std::string in = "    ";
    Define(os, in, kPidSymbol, "tl.program_id(0)");
    for (size_t i = 0; i < k_.grid.pid_components.size(); ++i) {
      Define(os, in, PidVar(static_cast<int>(i)),
             Kernel(k_.grid.pid_components[i]));
    }
    for (const IndexMap& m : k_.index_maps) {
      const int rank = m.lane_rank();
      for (int j = 0; j < rank; ++j) {
        const SymExpr size = m.lane_sizes[j];
        for (const std::string& s : FreeSymbols(size)) {
          if (!k_.symbols.IsConstexpr(s)) {
            Fail(ErrorCode::kSpec, "tile extent " + ToInfix(size) + " of '" +
                                       m.param +
                                       "' is not a compile-time constant");
          }
        }
        std::string lane = "tl.arange(0, " + Kernel(size) + ")";
        if (rank > 1) {
          lane += "[";
          for (int d = 0; d < rank; ++d) {
            if (d) lane += ", ";
            lane += d == j ? ":" : "None";
          }
          lane += "]";
        }
        Define(os, in, LaneName(m.param, j), lane);
      }
      lane_renames_[m.param] = {};
      for (int j = 0; j < rank; ++j) {
        lane_renames_[m.param][LaneVar(j)] = SymExpr::Sym(LaneName(m.param, j));
      }
      if (m.nest_sizes.empty()) {
        Define(os, in, m.param + "_offsets", OffsetText(m, {}));
        if (!m.mask.empty()) Define(os, in, m.param + "_mask", MaskText(m, {}));
      }
    }
    EmitBlock(os, k_.application, 1);
  }

  std::map<std::string, SymExpr> Renames(const IndexMap& m,
                                         const std::vector<TileExpr>& nest) {
    std::map<std::string, SymExpr> r = lane_renames_.at(m.param);
    for (size_t k = 0; k < nest.size(); ++k) {
      r[NestVar(static_cast<int>(k))] = IndexExprOf(nest[k], k_.arranged);
    }
    return r;
  }

  std::string OffsetText(const IndexMap& m, const std::vector<TileExpr>& nest) {
    SymExpr off = Substitute(m.offset, Renames(m, nest));
    // Lanes the offset does not depend on still shape the pointer tile.
    const std::set<std::string> free = FreeSymbols(off);
    for (int j = 0; j < m.lane_rank(); ++j) {
      const std::string lane = LaneName(m.param, j);
      if (!free.count(lane)) {
        off = SymExpr::Binary(
            ExprKind::kAdd, off,
            SymExpr::Binary(ExprKind::kMul, SymExpr::Const(0), SymExpr::Sym(lane)));
      }
    }
    return Kernel(off);
  }

  std::string MaskText(const IndexMap& m, const std::vector<TileExpr>& nest) {
    const auto renames = Renames(m, nest);
    std::string s;
    for (size_t i = 0; i < m.mask.size(); ++i) {
      std::string term = Kernel(Substitute(m.mask[i].index, renames)) + " < " +
                         Kernel(Substitute(m.mask[i].bound, renames));
      if (m.mask.size() > 1) term = "(" + term + ")";
      s += (i ? " & " : "") + term;
    }
    return s;
  }

  void EmitBlock(std::ostream& os, const std::vector<TileStmt>& stmts,
                 int depth) {
    const std::string in(4 * depth, ' ');
    if (stmts.empty()) {
      os << in << "pass\n";
      return;
    }
    for (const TileStmt& s : stmts) {
      if (s.kind != TileStmt::Kind::kFor) HoistAddressing(os, in, s);
      switch (s.kind) {
        case TileStmt::Kind::kLet:
          Define(os, in, s.name, Expr(s.value, 0));
          break;
        case TileStmt::Kind::kAccumulate:
          os << in << s.name << " += " << Expr(s.value, 0) << "\n";
          break;
        case TileStmt::Kind::kStore:
          EmitStore(os, in, s);
          break;
        case TileStmt::Kind::kFor:
          out_.kernel_defined.insert(s.name);
          os << in << "for " << s.name << " in range("
             << Kernel(IndexExprOf(s.value, k_.arranged)) << "):\n";
          EmitBlock(os, s.body, depth + 1);
          break;
      }
    }
  }

  static void CollectLoads(const TileExpr& e, std::vector<const TileNode*>& out) {
    if (e->op == TileOp::kLoad) out.push_back(e.get());
    for (const TileExpr& a : e->args) CollectLoads(a, out);
  }

  // Names the addresses of nest-indexed parameters accessed once by `s`, so
  // the access itself stays short.
  void HoistAddressing(std::ostream& os, const std::string& in,
                       const TileStmt& s) {
    std::vector<const TileNode*> loads;
    CollectLoads(s.value, loads);
    std::map<std::string, int> uses;
    for (const TileNode* n : loads) ++uses[n->name];
    if (s.kind == TileStmt::Kind::kStore) ++uses[s.name];
    auto hoist = [&](const std::string& param,
                     const std::vector<TileExpr>& nest) {
      const ParamDecl* p = k_.spec.FindParam(param);
      if (p->is_scalar() || uses[param] != 1) return false;
      const IndexMap& m = k_.MapFor(param);
      if (m.nest_sizes.empty()) return false;
      Define(os, in, param + "_offsets", OffsetText(m, nest));
      if (!m.mask.empty()) Define(os, in, param + "_mask", MaskText(m, nest));
      return true;
    };
    for (const TileNode* n : loads) {
      if (hoist(n->name, n->args)) named_.insert(n);
    }
    if (s.kind == TileStmt::Kind::kStore && hoist(s.name, s.nest)) {
      named_store_ = &s;
    }
  }

  void EmitStore(std::ostream& os, const std::string& in, const TileStmt& s) {
    const IndexMap& m = k_.MapFor(s.name);
    const ParamDecl* p = k_.spec.FindParam(s.name);
    std::string value = Expr(s.value, 0);
    auto it = k_.types.shapes.find(s.value.get());
    if (it != k_.types.shapes.end() && it->second != m.lane_sizes) {
      std::vector<std::string> dims;
      for (const SymExpr& d : m.lane_sizes) dims.push_back(Kernel(d));
      value = "tl.broadcast_to(" + value + ", " + ShapeTuple(dims) + ")";
    }
    if (p->kind != ScalarKind::kF32) {
      value = "(" + value + ").to(" + DtypeName(p->kind) + ")";
    }
    const bool hoisted = m.nest_sizes.empty() || named_store_ == &s;
    const std::string off =
        hoisted ? s.name + "_offsets" : OffsetText(m, s.nest);
    os << in << "tl.store(ptr_" << s.name << " + " << Wrap(off, hoisted) << ", "
       << value;
    if (!m.mask.empty()) {
      os << ", mask=" << (hoisted ? s.name + "_mask" : MaskText(m, s.nest));
    }
    os << ")\n";
  }

  static std::string Wrap(const std::string& s, bool atom) {
    return atom ? s : "(" + s + ")";
  }

  // Python precedence levels: 1 additive, 2 multiplicative, 3 unary, 4 atom.
  std::string Expr(const TileExpr& e, int context) {
    auto paren = [&](int level, const std::string& s) {
      return level < context ? "(" + s + ")" : s;
    };
    auto binary = [&](const char* op, int level) {
      return paren(level, Expr(e->args[0], level) + " " + op + " " +
                              Expr(e->args[1], level + 1));
    };
    auto call = [&](const char* fn) {
      return std::string(fn) + "(" + Expr(e->args[0], 0) + ")";
    };
    switch (e->op) {
      case TileOp::kLoad:
        return Load(*e);
      case TileOp::kLocal:
        return e->name;
      case TileOp::kConst: {
        std::string lit = FloatLiteral(e->value);
        return e->value < 0 ? paren(3, lit) : lit;
      }
      case TileOp::kAdd:
        return binary("+", 1);
      case TileOp::kSub:
        return binary("-", 1);
      case TileOp::kMul:
        return binary("*", 2);
      case TileOp::kDiv:
        return binary("/", 2);
      case TileOp::kExp:
        return call("tl.exp");
      case TileOp::kSqrt:
        return call("tl.sqrt");
      case TileOp::kNeg:
        return paren(3, "-" + Expr(e->args[0], 3));
      case TileOp::kSigmoid:
        return call("tl.sigmoid");
      case TileOp::kDot:
        return "tl.dot(" + Expr(e->args[0], 0) + ", " + Expr(e->args[1], 0) +
               ", allow_tf32=False)";
      case TileOp::kZeros: {
        std::vector<std::string> dims;
        for (const SymExpr& d : e->shape) dims.push_back(Kernel(Simplify(d)));
        return "tl.zeros(" + ShapeTuple(dims) + ", dtype=" + DtypeName(e->kind) +
               ")";
      }
      case TileOp::kSum:
      case TileOp::kMax:
        return std::string(e->op == TileOp::kSum ? "tl.sum(" : "tl.max(") +
               Expr(e->args[0], 0) + ", axis=" + std::to_string(e->axis) + ")";
      case TileOp::kShapeOf:
      case TileOp::kSymValue: {
        const SymExpr v = IndexExprOf(e, k_.arranged);
        std::string s = Kernel(v);
        return v.is_const() || v.kind() == ExprKind::kSym ? s : "(" + s + ")";
      }
    }
    Fail(ErrorCode::kSpec, std::string("no Triton lowering for '") +
                               TileOpName(e->op) + "'");
  }

  std::string Load(const TileNode& n) {
    const ParamDecl* p = k_.spec.FindParam(n.name);
    if (p->is_scalar()) return n.name;
    const IndexMap& m = k_.MapFor(n.name);
    const bool hoisted = m.nest_sizes.empty() || named_.count(&n);
    std::string s = "tl.load(ptr_" + n.name + " + " +
                    (hoisted ? n.name + "_offsets" : "(" + OffsetText(m, n.args) + ")");
    if (!m.mask.empty()) {
      s += ", mask=" + (hoisted ? n.name + "_mask" : MaskText(m, n.args)) +
           ", other=" + FloatLiteral(n.fill.value_or(0.0));
    }
    s += ")";
    if (p->kind != ScalarKind::kF32) s += ".to(tl.float32)";
    return s;
  }

  // ---------------------------------------------------------------------
  // Host side.

  std::vector<std::string> GridArguments() const {
    const std::set<std::string> free = FreeSymbols(k_.grid.total);
    std::vector<std::string> out;
    for (const std::string& name : k_.symbols.names()) {
      if (free.count(name)) out.push_back(name);
    }
    return out;
  }

  void EmitGrid(std::ostream& os) {
    const std::vector<std::string> args = GridArguments();
    os << "def " << out_.grid_name << "(";
    for (size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << args[i];
    os << "):\n"
       << "    return (" << ToInfix(k_.grid.total, kHostStyle) << ",)\n";
  }

  void EmitLauncher(std::ostream& os) {
    os << "def " << out_.launcher_name << "(";
    bool first = true;
    for (const ParamDecl& p : k_.spec.params) {
      os << (first ? "" : ", ") << p.name;
      first = false;
    }
    const std::vector<std::string> meta = MetaNames();
    if (!meta.empty()) {
      os << ", *";
      for (const std::string& m : meta) os << ", " << m;
    }
    os << "):\n";
    for (const ParamDecl& p : k_.spec.params) {
      if (p.is_scalar()) {
        os << "    " << p.name << " = float(" << p.name << ")\n";
        continue;
      }
      os << "    assert isinstance(" << p.name << ", torch.Tensor) and "
         << p.name << ".dim() == " << p.rank << "\n";
      for (int i = 0; i < p.rank; ++i) {
        os << "    " << p.name << "_size_" << i << " = " << p.name << ".size("
           << i << ")\n";
      }
      for (int i = 0; i < p.rank; ++i) {
        os << "    " << p.name << "_stride_" << i << " = " << p.name
           << ".stride(" << i << ")\n";
      }
    }
    for (const ShapeCheck& c : k_.launch_checks) {
      os << "    assert " << ToInfix(c.lhs, kHostStyle)
         << " == " << ToInfix(c.rhs, kHostStyle) << ", "
         << nlohmann::json(c.what).dump() << "\n";
    }
    const std::vector<std::string> grid_args = GridArguments();
    os << "    grid = " << out_.grid_name << "(";
    for (size_t i = 0; i < grid_args.size(); ++i) {
      os << (i ? ", " : "") << grid_args[i];
    }
    os << ")\n";
    os << "    " << out_.kernel_name << "[grid](\n";
    for (const KernelArgument& a : out_.arguments) {
      const std::string value =
          a.meaning == KernelArgument::Meaning::kPointer ? a.param : a.name;
      os << "        " << value << ",\n";
    }
    os << "    )\n";
    for (const ParamDecl& p : k_.spec.params) {
      if (p.role == Role::kOut) {
        os << "    return " << p.name << "\n";
        break;
      }
    }
  }

  const CompiledKernel& k_;
  EmittedKernel out_;
  std::map<std::string, std::map<std::string, SymExpr>> lane_renames_;
  std::set<const TileNode*> named_;
  const TileStmt* named_store_ = nullptr;
};

}  // namespace

const char* MeaningName(KernelArgument::Meaning m) {
  switch (m) {
    case KernelArgument::Meaning::kPointer:
      return "pointer";
    case KernelArgument::Meaning::kSize:
      return "size";
    case KernelArgument::Meaning::kStride:
      return "stride";
    case KernelArgument::Meaning::kScalar:
      return "scalar";
    case KernelArgument::Meaning::kMeta:
      return "meta";
  }
  return "?";
}

EmittedKernel EmitTriton(const CompiledKernel& kernel) {
  return Emitter(kernel).Run();
}

nlohmann::ordered_json ManifestJson(const CompiledKernel& kernel,
                                    const EmittedKernel& emitted) {
  using J = nlohmann::ordered_json;
  J j;
  j["kernel"] = emitted.kernel_name;
  j["grid"] = emitted.grid_name;
  j["launcher"] = emitted.launcher_name;
  J params = J::array();
  for (const ParamDecl& p : kernel.spec.params) {
    params.push_back(J{{"name", p.name},
                       {"role", p.role == Role::kIn ? "in" : "out"},
                       {"kind", ScalarKindName(p.kind)},
                       {"rank", p.rank}});
  }
  j["params"] = std::move(params);
  J meta = J::array();
  for (const KernelArgument& a : emitted.arguments) {
    if (a.meaning == KernelArgument::Meaning::kMeta) meta.push_back(a.name);
  }
  j["meta"] = std::move(meta);
  j["launcher_arguments"] = emitted.launcher_arguments;
  J args = J::array();
  for (const KernelArgument& a : emitted.arguments) {
    J aj;
    aj["name"] = a.name;
    aj["meaning"] = MeaningName(a.meaning);
    if (!a.param.empty()) aj["param"] = a.param;
    if (a.meaning == KernelArgument::Meaning::kSize ||
        a.meaning == KernelArgument::Meaning::kStride) {
      aj["dim"] = a.dim;
    }
    aj["constexpr"] = a.constexpr_;
    args.push_back(std::move(aj));
  }
  j["kernel_arguments"] = std::move(args);
  j["grid_total"] = ToInfix(kernel.grid.total);
  J checks = J::array();
  for (const ShapeCheck& c : kernel.launch_checks) {
    checks.push_back(J{{"lhs", CompactExprJson(c.lhs)},
                       {"rhs", CompactExprJson(c.rhs)},
                       {"what", c.what}});
  }
  j["launch_checks"] = std::move(checks);
  return j;
}

}  // namespace tw
