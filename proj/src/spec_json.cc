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

#include "spec_json.h"

#include <cmath>
#include <limits>

#include "error.h"

namespace tw {
namespace {

using J = nlohmann::ordered_json;

[[noreturn]] void PathFail(const std::string& path, const std::string& msg) {
  Fail(ErrorCode::kSpec, (path.empty() ? "/" : path) + ": " + msg);
}

std::string Child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}
std::string Child(const std::string& path, size_t i) {
  return path + "/" + std::to_string(i);
}

const J& Field(const J& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) PathFail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) PathFail(path, "missing field '" + key + "'");
  return *it;
}

void RejectUnknownKeys(const J& obj, std::initializer_list<const char*> allowed,
                       const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok |= it.key() == a;
    if (!ok) PathFail(Child(path, it.key()), "unknown field");
  }
}

std::string GetString(const J& j, const std::string& path) {
  if (!j.is_string()) PathFail(path, "expected a string");
  return j.get<std::string>();
}

int GetInt(const J& j, const std::string& path) {
  if (!j.is_number_integer()) PathFail(path, "expected an integer");
  int64_t v = j.get<int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    PathFail(path, "integer out of range");
  }
  return static_cast<int>(v);
}

double GetNumber(const J& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  PathFail(path, "expected a number");
}

J NumberJson(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

const J& GetArray(const J& j, const std::string& path) {
  if (!j.is_array()) PathFail(path, "expected an array");
  return j;
}

// ---------------------------------------------------------------------------
// Arrangement.

J ArgJson(const ArrangeArg& a) {
  switch (a.kind) {
    case ArrangeArg::Kind::kDefault:
      return -1;
    case ArrangeArg::Kind::kExpr:
      return CompactExprJson(a.expr);
    case ArrangeArg::Kind::kShapeOf:
      return J{{"shape_of", a.param}, {"level", a.level}, {"dim", a.dim}};
  }
  return nullptr;
}

ArrangeArg ParseArg(const J& j, const std::string& path) {
  if (j.is_number_integer() && j.get<int64_t>() == -1) {
    return ArrangeArg::Default();
  }
  if (j.is_object()) {
    RejectUnknownKeys(j, {"shape_of", "level", "dim"}, path);
    return ArrangeArg::ShapeOf(
        GetString(Field(j, "shape_of", path), Child(path, "shape_of")),
        j.contains("level") ? GetInt(j["level"], Child(path, "level")) : 0,
        GetInt(Field(j, "dim", path), Child(path, "dim")));
  }
  return ArrangeArg::Expr(CompactExprFromJson(j, path));
}

J ArgsJson(const std::vector<ArrangeArg>& args) {
  J out = J::array();
  for (const ArrangeArg& a : args) out.push_back(ArgJson(a));
  return out;
}

std::vector<ArrangeArg> ParseArgs(const J& j, const std::string& path) {
  std::vector<ArrangeArg> out;
  const J& arr = GetArray(j, path);
  for (size_t i = 0; i < arr.size(); ++i) {
    out.push_back(ParseArg(arr[i], Child(path, i)));
  }
  return out;
}

J OpsJson(const std::vector<ArrangeOp>& ops);

J OpJson(const ArrangeOp& op) {
  J j;
  j["op"] = ArrangeOpName(op.kind);
  switch (op.kind) {
    case ArrangeOp::Kind::kTile:
      j["shape"] = ArgsJson(op.shape);
      if (op.strides) j["strides"] = ArgsJson(*op.strides);
      break;
    case ArrangeOp::Kind::kExpand:
      j["shape"] = ArgsJson(op.shape);
      break;
    case ArrangeOp::Kind::kSqueeze:
      j["dim"] = op.dim;
      break;
    case ArrangeOp::Kind::kPermute:
      j["order"] = op.order;
      break;
    case ArrangeOp::Kind::kFlatten:
      j["start"] = op.start_dim;
      if (op.end_dim) j["end"] = *op.end_dim;
      break;
    case ArrangeOp::Kind::kRavel:
      break;
    case ArrangeOp::Kind::kInner:
      j["ops"] = OpsJson(op.ops);
      break;
  }
  return j;
}

J OpsJson(const std::vector<ArrangeOp>& ops) {
  J out = J::array();
  for (const ArrangeOp& op : ops) out.push_back(OpJson(op));
  return out;
}

std::vector<ArrangeOp> ParseOps(const J& j, const std::string& path);

ArrangeOp ParseOp(const J& j, const std::string& path) {
  const std::string name = GetString(Field(j, "op", path), Child(path, "op"));
  ArrangeOp op;
  if (name == "tile") {
    RejectUnknownKeys(j, {"op", "shape", "strides"}, path);
    op.kind = ArrangeOp::Kind::kTile;
    op.shape = ParseArgs(Field(j, "shape", path), Child(path, "shape"));
    if (j.contains("strides")) {
      op.strides = ParseArgs(j["strides"], Child(path, "strides"));
    }
  } else if (name == "expand") {
    RejectUnknownKeys(j, {"op", "shape"}, path);
    op.kind = ArrangeOp::Kind::kExpand;
    op.shape = ParseArgs(Field(j, "shape", path), Child(path, "shape"));
  } else if (name == "squeeze") {
    RejectUnknownKeys(j, {"op", "dim"}, path);
    op.kind = ArrangeOp::Kind::kSqueeze;
    op.dim = GetInt(Field(j, "dim", path), Child(path, "dim"));
  } else if (name == "permute") {
    RejectUnknownKeys(j, {"op", "order"}, path);
    op.kind = ArrangeOp::Kind::kPermute;
    const std::string p = Child(path, "order");
    const J& arr = GetArray(Field(j, "order", path), p);
    for (size_t i = 0; i < arr.size(); ++i) {
      op.order.push_back(GetInt(arr[i], Child(p, i)));
    }
  } else if (name == "flatten") {
    RejectUnknownKeys(j, {"op", "start", "end"}, path);
    op.kind = ArrangeOp::Kind::kFlatten;
    if (j.contains("start")) op.start_dim = GetInt(j["start"], Child(path, "start"));
    if (j.contains("end")) op.end_dim = GetInt(j["end"], Child(path, "end"));
  } else if (name == "ravel") {
    RejectUnknownKeys(j, {"op"}, path);
    op.kind = ArrangeOp::Kind::kRavel;
  } else if (name == "inner") {
    RejectUnknownKeys(j, {"op", "ops"}, path);
    op.kind = ArrangeOp::Kind::kInner;
    op.ops = ParseOps(Field(j, "ops", path), Child(path, "ops"));
  } else {
    PathFail(Child(path, "op"), "unknown arrangement op '" + name + "'");
  }
  return op;
}

std::vector<ArrangeOp> ParseOps(const J& j, const std::string& path) {
  std::vector<ArrangeOp> out;
  const J& arr = GetArray(j, path);
  for (size_t i = 0; i < arr.size(); ++i) {
    out.push_back(ParseOp(arr[i], Child(path, i)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Application.

J ExprJson(const TileExpr& e) {
  J j;
  j["t"] = TileOpName(e->op);
  auto args = [&] {
    J a = J::array();
    for (const TileExpr& x : e->args) a.push_back(ExprJson(x));
    return a;
  };
  switch (e->op) {
    case TileOp::kLoad:
      j["param"] = e->name;
      if (!e->args.empty()) j["nest"] = args();
      if (e->fill) j["fill"] = NumberJson(*e->fill);
      break;
    case TileOp::kLocal:
      j["name"] = e->name;
      break;
    case TileOp::kConst:
      j["value"] = NumberJson(e->value);
      break;
    case TileOp::kZeros: {
      J shape = J::array();
      for (const SymExpr& s : e->shape) shape.push_back(CompactExprJson(s));
      j["shape"] = shape;
      j["kind"] = ScalarKindName(e->kind);
      break;
    }
    case TileOp::kSum:
    case TileOp::kMax:
      j["args"] = args();
      j["axis"] = e->axis;
      break;
    case TileOp::kShapeOf:
      j["param"] = e->name;
      j["dim"] = e->axis;
      break;
    case TileOp::kSymValue:
      j["expr"] = CompactExprJson(e->sym);
      break;
    default:
      j["args"] = args();
  }
  return j;
}

TileExpr ParseExpr(const J& j, const std::string& path) {
  const std::string name = GetString(Field(j, "t", path), Child(path, "t"));
  auto args = [&](size_t n) {
    const std::string p = Child(path, "args");
    const J& arr = GetArray(Field(j, "args", path), p);
    if (arr.size() != n) {
      PathFail(p, "'" + name + "' takes " + std::to_string(n) + " operand(s)");
    }
    std::vector<TileExpr> out;
    for (size_t i = 0; i < arr.size(); ++i) {
      out.push_back(ParseExpr(arr[i], Child(p, i)));
    }
    return out;
  };
  if (name == "load") {
    RejectUnknownKeys(j, {"t", "param", "nest", "fill"}, path);
    std::vector<TileExpr> nest;
    if (j.contains("nest")) {
      const std::string p = Child(path, "nest");
      const J& arr = GetArray(j["nest"], p);
      for (size_t i = 0; i < arr.size(); ++i) {
        nest.push_back(ParseExpr(arr[i], Child(p, i)));
      }
    }
    std::optional<double> fill;
    if (j.contains("fill")) fill = GetNumber(j["fill"], Child(path, "fill"));
    return ir::Load(GetString(Field(j, "param", path), Child(path, "param")),
                    std::move(nest), fill);
  }
  if (name == "local") {
    RejectUnknownKeys(j, {"t", "name"}, path);
    return ir::Local(GetString(Field(j, "name", path), Child(path, "name")));
  }
  if (name == "const") {
    RejectUnknownKeys(j, {"t", "value"}, path);
    return ir::Lit(GetNumber(Field(j, "value", path), Child(path, "value")));
  }
  if (name == "zeros") {
    RejectUnknownKeys(j, {"t", "shape", "kind"}, path);
    const std::string p = Child(path, "shape");
    const J& arr = GetArray(Field(j, "shape", path), p);
    std::vector<SymExpr> shape;
    for (size_t i = 0; i < arr.size(); ++i) {
      shape.push_back(CompactExprFromJson(arr[i], Child(p, i)));
    }
    ScalarKind kind = ScalarKind::kF32;
    if (j.contains("kind")) {
      try {
        kind = ScalarKindFromName(GetString(j["kind"], Child(path, "kind")));
      } catch (const Error& e) {
        PathFail(Child(path, "kind"), e.what());
      }
    }
    return ir::Zeros(std::move(shape), kind);
  }
  if (name == "sum" || name == "max") {
    RejectUnknownKeys(j, {"t", "args", "axis"}, path);
    auto a = args(1);
    int axis = GetInt(Field(j, "axis", path), Child(path, "axis"));
    return name == "sum" ? ir::Sum(a[0], axis) : ir::Max(a[0], axis);
  }
  if (name == "shape_of") {
    RejectUnknownKeys(j, {"t", "param", "dim"}, path);
    return ir::ShapeOf(GetString(Field(j, "param", path), Child(path, "param")),
                       GetInt(Field(j, "dim", path), Child(path, "dim")));
  }
  if (name == "sym_value") {
    RejectUnknownKeys(j, {"t", "expr"}, path);
    return ir::SymValue(
        CompactExprFromJson(Field(j, "expr", path), Child(path, "expr")));
  }
  RejectUnknownKeys(j, {"t", "args"}, path);
  using Binary = TileExpr (*)(TileExpr, TileExpr);
  using Unary = TileExpr (*)(TileExpr);
  static const std::pair<const char*, Binary> kBinary[] = {
      {"add", ir::Add}, {"sub", ir::Sub}, {"mul", ir::Mul},
      {"div", ir::Div}, {"dot", ir::Dot}};
  static const std::pair<const char*, Unary> kUnary[] = {
      {"exp", ir::Exp}, {"sqrt", ir::Sqrt}, {"neg", ir::Neg},
      {"sigmoid", ir::Sigmoid}};
  for (const auto& [n, f] : kBinary) {
    if (name == n) {
      auto a = args(2);
      return f(a[0], a[1]);
    }
  }
  for (const auto& [n, f] : kUnary) {
    if (name == n) return f(args(1)[0]);
  }
  PathFail(Child(path, "t"), "unknown tile op '" + name + "'");
}

J StmtsJson(const std::vector<TileStmt>& stmts) {
  J out = J::array();
  for (const TileStmt& s : stmts) {
    J j;
    switch (s.kind) {
      case TileStmt::Kind::kLet:
        j["t"] = "let";
        j["name"] = s.name;
        j["value"] = ExprJson(s.value);
        break;
      case TileStmt::Kind::kAccumulate:
        j["t"] = "accumulate";
        j["name"] = s.name;
        j["value"] = ExprJson(s.value);
        break;
      case TileStmt::Kind::kStore:
        j["t"] = "store";
        j["param"] = s.name;
        if (!s.nest.empty()) {
          J nest = J::array();
          for (const TileExpr& i : s.nest) nest.push_back(ExprJson(i));
          j["nest"] = nest;
        }
        j["value"] = ExprJson(s.value);
        break;
      case TileStmt::Kind::kFor:
        j["t"] = "for";
        j["var"] = s.name;
        j["extent"] = ExprJson(s.value);
        j["body"] = StmtsJson(s.body);
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<TileStmt> ParseStmts(const J& j, const std::string& path) {
  std::vector<TileStmt> out;
  const J& arr = GetArray(j, path);
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string p = Child(path, i);
    const J& s = arr[i];
    const std::string t = GetString(Field(s, "t", p), Child(p, "t"));
    auto value = [&] {
      return ParseExpr(Field(s, "value", p), Child(p, "value"));
    };
    auto str = [&](const char* key) {
      return GetString(Field(s, key, p), Child(p, key));
    };
    if (t == "let") {
      RejectUnknownKeys(s, {"t", "name", "value"}, p);
      out.push_back(TileStmt::Let(str("name"), value()));
    } else if (t == "accumulate") {
      RejectUnknownKeys(s, {"t", "name", "value"}, p);
      out.push_back(TileStmt::Accumulate(str("name"), value()));
    } else if (t == "store") {
      RejectUnknownKeys(s, {"t", "param", "nest", "value"}, p);
      std::vector<TileExpr> nest;
      if (s.contains("nest")) {
        const std::string np = Child(p, "nest");
        const J& narr = GetArray(s["nest"], np);
        for (size_t k = 0; k < narr.size(); ++k) {
          nest.push_back(ParseExpr(narr[k], Child(np, k)));
        }
      }
      out.push_back(TileStmt::Store(str("param"), value(), std::move(nest)));
    } else if (t == "for") {
      RejectUnknownKeys(s, {"t", "var", "extent", "body"}, p);
      out.push_back(TileStmt::For(
          str("var"), ParseExpr(Field(s, "extent", p), Child(p, "extent")),
          ParseStmts(Field(s, "body", p), Child(p, "body"))));
    } else {
      PathFail(Child(p, "t"), "unknown statement '" + t + "'");
    }
  }
  return out;
}

}  // namespace

J CompactExprJson(const SymExpr& e) {
  switch (e.kind()) {
    case ExprKind::kConst:
      return e.value();
    case ExprKind::kSym:
      return e.name();
    case ExprKind::kNeg:
      return J::array({"neg", CompactExprJson(e.operand())});
    default: {
      J full = ToJson(e);
      return J::array({full[0], CompactExprJson(e.lhs()), CompactExprJson(e.rhs())});
    }
  }
}

SymExpr CompactExprFromJson(const J& j, const std::string& path) {
  if (j.is_number_integer()) return SymExpr::Const(j.get<int64_t>());
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (!IsIdentifier(name)) PathFail(path, "invalid symbol '" + name + "'");
    return SymExpr::Sym(name);
  }
  if (!j.is_array() || j.empty() || !j[0].is_string()) {
    PathFail(path, "expected an integer, a symbol or an [op, ...] array");
  }
  const std::string tag = j[0].get<std::string>();
  // Normalize compact operands into the tagged form and reuse its parser.
  J tagged = J::array({tag});
  if (tag == "const" || tag == "sym") {
    tagged = j;
  } else {
    for (size_t i = 1; i < j.size(); ++i) {
      tagged.push_back(ToJson(CompactExprFromJson(j[i], Child(path, i))));
    }
  }
  try {
    return SymExprFromJson(tagged);
  } catch (const Error& e) {
    PathFail(path, e.what());
  }
}

KernelSpec ParseSpec(const J& j) {
  if (!j.is_object()) PathFail("", "kernel spec must be an object");
  RejectUnknownKeys(j, {"name", "params", "meta", "base", "arrangement",
                        "application", "checks"},
                    "");
  KernelSpec spec;
  spec.name = GetString(Field(j, "name", ""), "/name");

  const J& params = GetArray(Field(j, "params", ""), "/params");
  for (size_t i = 0; i < params.size(); ++i) {
    const std::string p = Child("/params", i);
    const J& pj = params[i];
    RejectUnknownKeys(pj, {"name", "rank", "kind", "role", "shape_constexpr"}, p);
    ParamDecl d;
    d.name = GetString(Field(pj, "name", p), Child(p, "name"));
    d.rank = GetInt(Field(pj, "rank", p), Child(p, "rank"));
    if (pj.contains("kind")) {
      try {
        d.kind = ScalarKindFromName(GetString(pj["kind"], Child(p, "kind")));
      } catch (const Error& e) {
        PathFail(Child(p, "kind"), e.what());
      }
    }
    const std::string role = GetString(Field(pj, "role", p), Child(p, "role"));
    if (role == "in") {
      d.role = Role::kIn;
    } else if (role == "out") {
      d.role = Role::kOut;
    } else {
      PathFail(Child(p, "role"), "role must be 'in' or 'out', got '" + role + "'");
    }
    if (pj.contains("shape_constexpr")) {
      if (!pj["shape_constexpr"].is_boolean()) {
        PathFail(Child(p, "shape_constexpr"), "expected a boolean");
      }
      d.shape_constexpr = pj["shape_constexpr"].get<bool>();
    }
    for (const ParamDecl& prev : spec.params) {
      if (prev.name == d.name) {
        PathFail(Child(p, "name"), "duplicate parameter '" + d.name + "'");
      }
    }
    spec.params.push_back(std::move(d));
  }

  if (j.contains("meta")) {
    const J& meta = GetArray(j["meta"], "/meta");
    for (size_t i = 0; i < meta.size(); ++i) {
      spec.meta.push_back(GetString(meta[i], Child("/meta", i)));
    }
  }
  if (j.contains("base")) spec.base = GetString(j["base"], "/base");

  if (j.contains("arrangement")) {
    const J& arr = j["arrangement"];
    if (!arr.is_object()) PathFail("/arrangement", "expected an object");
    for (auto it = arr.begin(); it != arr.end(); ++it) {
      const std::string p = Child("/arrangement", it.key());
      const ParamDecl* d = spec.FindParam(it.key());
      if (!d) PathFail(p, "unknown parameter '" + it.key() + "'");
      if (d->is_scalar()) PathFail(p, "scalar parameters are not arranged");
      spec.arrangement[it.key()] = ParseOps(it.value(), p);
    }
  }
  if (j.contains("application")) {
    spec.application = ParseStmts(j["application"], "/application");
  }
  if (j.contains("checks")) {
    const J& checks = GetArray(j["checks"], "/checks");
    for (size_t i = 0; i < checks.size(); ++i) {
      const std::string p = Child("/checks", i);
      RejectUnknownKeys(checks[i], {"lhs", "rhs", "what"}, p);
      ShapeCheck c;
      c.lhs = CompactExprFromJson(Field(checks[i], "lhs", p), Child(p, "lhs"));
      c.rhs = CompactExprFromJson(Field(checks[i], "rhs", p), Child(p, "rhs"));
      if (checks[i].contains("what")) {
        c.what = GetString(checks[i]["what"], Child(p, "what"));
      }
      spec.checks.push_back(std::move(c));
    }
  }
  return spec;
}

KernelSpec ParseSpecText(const std::string& text) {
  J j;
  try {
    j = J::parse(text);
  } catch (const J::parse_error& e) {
    Fail(ErrorCode::kSpec, std::string("malformed JSON: ") + e.what());
  }
  return ParseSpec(j);
}

J SerializeSpec(const KernelSpec& spec) {
  J j;
  j["name"] = spec.name;
  J params = J::array();
  for (const ParamDecl& p : spec.params) {
    J pj;
    pj["name"] = p.name;
    pj["rank"] = p.rank;
    pj["kind"] = ScalarKindName(p.kind);
    pj["role"] = p.role == Role::kIn ? "in" : "out";
    if (p.shape_constexpr) pj["shape_constexpr"] = true;
    params.push_back(std::move(pj));
  }
  j["params"] = std::move(params);
  j["meta"] = spec.meta;
  if (!spec.base.empty()) j["base"] = spec.base;
  // Arrangement in parameter order rather than map order.
  J arr = J::object();
  for (const ParamDecl& p : spec.params) {
    auto it = spec.arrangement.find(p.name);
    if (it != spec.arrangement.end()) arr[p.name] = OpsJson(it->second);
  }
  j["arrangement"] = std::move(arr);
  j["application"] = StmtsJson(spec.application);
  J checks = J::array();
  for (const ShapeCheck& c : spec.checks) {
    checks.push_back(J{{"lhs", CompactExprJson(c.lhs)},
                       {"rhs", CompactExprJson(c.rhs)},
                       {"what", c.what}});
  }
  j["checks"] = std::move(checks);
  return j;
}

std::string SerializeSpecText(const KernelSpec& spec) {
  return SerializeSpec(spec).dump(2) + "\n";
}

}  // namespace tw
