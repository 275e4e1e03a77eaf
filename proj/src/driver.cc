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

#include "driver.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "error.h"
#include "oracle.h"
#include "sim.h"
#include "tensor.h"
#include "verify.h"

namespace tw {
namespace {

using Json = nlohmann::ordered_json;

std::optional<int64_t> TryEval(const SymExpr& e, const Binding& b) {
  for (const std::string& s : FreeSymbols(e)) {
    if (!b.count(s)) return std::nullopt;
  }
  try {
    return Eval(e, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Json ValueOrNull(const std::optional<int64_t>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json ExprList(const std::vector<SymExpr>& es) {
  Json out = Json::array();
  for (const SymExpr& e : es) out.push_back(ToInfix(e));
  return out;
}

Json ValueList(const std::vector<SymExpr>& es, const Binding& b) {
  Json out = Json::array();
  for (const SymExpr& e : es) out.push_back(ValueOrNull(TryEval(e, b)));
  return out;
}

Json BindingJson(const Binding& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b) j[k] = v;
  return j;
}

const ParamDecl& DeclFor(const KernelSpec& spec, const std::string& name) {
  for (const ParamDecl& p : spec.params) {
    if (p.name == name) return p;
  }
  Fail(ErrorCode::kInternal, "no parameter '" + name + "'");
}

const char* RoleText(Role r) { return r == Role::kOut ? "out" : "in"; }

bool IsMeta(const KernelSpec& spec, const CompiledKernel& kernel,
            const std::string& name) {
  if (std::find(spec.meta.begin(), spec.meta.end(), name) != spec.meta.end()) {
    return true;
  }
  const std::vector<std::string> req = RequiredMeta(kernel);
  return std::find(req.begin(), req.end(), name) != req.end();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) Fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace

SplitBindings SplitUserBindings(const CompiledKernel& kernel,
                                const CatalogEntry* entry, const Binding& bind) {
  SplitBindings out;
  for (const auto& [name, value] : bind) {
    if (value < 1) {
      Fail(ErrorCode::kInvalidArgument,
           "binding " + name + "=" + std::to_string(value) + " must be >= 1");
    }
    const bool is_dim =
        entry && std::find(entry->dims.begin(), entry->dims.end(), name) !=
                     entry->dims.end();
    const bool is_param =
        std::any_of(kernel.spec.params.begin(), kernel.spec.params.end(),
                    [&](const ParamDecl& p) { return p.name == name; });
    if (is_dim) {
      out.dims[name] = value;
    } else if (kernel.symbols.Contains(name) && !is_param) {
      out.symbols[name] = value;
    } else {
      Fail(ErrorCode::kInvalidArgument,
           "unknown symbol '" + name + "' for kernel '" + kernel.spec.name + "'");
    }
  }
  return out;
}

Binding ImpliedSymbols(const CompiledKernel& kernel, const CatalogEntry* entry,
                       const SplitBindings& split) {
  Binding out = split.symbols;
  if (!entry || split.dims.empty()) return out;
  Binding dims = split.dims;
  for (const auto& [k, v] : entry->default_dims) dims.emplace(k, v);
  for (const ParamDecl& p : kernel.spec.params) {
    if (p.is_scalar()) continue;
    auto it = entry->shapes.find(p.name);
    if (it == entry->shapes.end()) continue;
    std::vector<std::optional<int64_t>> sizes;
    for (const SymExpr& e : it->second) sizes.push_back(TryEval(e, dims));
    int64_t stride = 1;
    bool strides_known = true;
    for (int i = p.rank; i-- > 0;) {
      const std::string idx = std::to_string(i);
      if (sizes[i]) out.emplace(p.name + "_size_" + idx, *sizes[i]);
      if (strides_known) out.emplace(p.name + "_stride_" + idx, stride);
      if (sizes[i]) {
        stride *= *sizes[i];
      } else {
        strides_known = false;
      }
    }
  }
  if (entry->derived_meta &&
      std::all_of(entry->dims.begin(), entry->dims.end(),
                  [&](const std::string& d) { return dims.count(d) > 0; })) {
    for (const auto& [k, v] : entry->derived_meta(dims)) out.emplace(k, v);
  }
  return out;
}

nlohmann::ordered_json InspectReport(const CompiledKernel& kernel,
                                     const CatalogEntry* entry,
                                     const Binding& bind) {
  const SplitBindings split = SplitUserBindings(kernel, entry, bind);
  const Binding b = ImpliedSymbols(kernel, entry, split);
  Json j;
  j["kernel"] = kernel.spec.name;
  j["meta"] = kernel.spec.meta;
  j["bindings"] = BindingJson(b);

  Json grid;
  grid["sizes"] = ExprList(kernel.grid.sizes);
  grid["total"] = ToInfix(kernel.grid.total);
  grid["size_values"] = ValueList(kernel.grid.sizes, b);
  grid["total_value"] = ValueOrNull(TryEval(kernel.grid.total, b));
  j["grid"] = std::move(grid);

  Json params = Json::array();
  for (size_t i = 0; i < kernel.arranged.size(); ++i) {
    const auto& [name, t] = kernel.arranged[i];
    const IndexMap& m = kernel.index_maps[i];
    const ParamDecl& decl = DeclFor(kernel.spec, name);
    Json p;
    p["name"] = name;
    p["role"] = RoleText(decl.role);
    p["kind"] = ScalarKindName(decl.kind);
    p["rank"] = decl.rank;
    Json levels = Json::array();
    for (int l = 0; l < t.num_levels(); ++l) {
      const std::vector<SymExpr> shape = t.Shape(l);
      Json level;
      level["shape"] = ExprList(shape);
      level["values"] = ValueList(shape, b);
      levels.push_back(std::move(level));
    }
    p["levels"] = std::move(levels);
    p["offset"] = ToInfix(m.offset);
    Json mask = Json::array();
    for (const MaskTerm& term : m.mask) {
      mask.push_back(ToInfix(term.index) + " < " + ToInfix(term.bound));
    }
    p["mask"] = std::move(mask);
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);

  Json checks = Json::array();
  for (const ShapeCheck& c : kernel.launch_checks) {
    Json cj;
    cj["what"] = c.what;
    cj["lhs"] = ToInfix(c.lhs);
    cj["rhs"] = ToInfix(c.rhs);
    const auto l = TryEval(c.lhs, b), r = TryEval(c.rhs, b);
    cj["lhs_value"] = ValueOrNull(l);
    cj["rhs_value"] = ValueOrNull(r);
    cj["status"] = (l && r) ? (*l == *r ? "ok" : "violated") : "unbound";
    checks.push_back(std::move(cj));
  }
  j["launch_checks"] = std::move(checks);
  return j;
}

nlohmann::ordered_json VerifyReport(const CompiledKernel& kernel,
                                    const CatalogEntry& entry,
                                    const Binding& bind, uint64_t seed,
                                    std::optional<double> tolerance, bool all) {
  const SplitBindings split = SplitUserBindings(kernel, &entry, bind);
  for (const auto& [name, v] : split.symbols) {
    if (!IsMeta(kernel.spec, kernel, name)) {
      Fail(ErrorCode::kInvalidArgument,
           "verify binds problem dims and meta-parameters, not '" + name + "'");
    }
  }
  const double tol = tolerance.value_or(DefaultTolerance(entry));
  std::vector<VerifyConfig> configs;
  if (all) {
    if (!bind.empty()) {
      Fail(ErrorCode::kInvalidArgument, "--all draws its own configurations");
    }
    configs = ConfigMatrix(entry, seed);
  } else {
    VerifyConfig c;
    c.dims = split.dims;
    c.meta = split.symbols;
    c.seed = seed;
    configs.push_back(CompleteConfig(entry, std::move(c)));
  }
  Json results = Json::array();
  int failures = 0;
  for (const VerifyConfig& c : configs) {
    const VerifyResult r = VerifyKernel(kernel, entry, c, tol);
    failures += r.passed() ? 0 : 1;
    results.push_back(VerifyResultJson(r));
  }
  Json j;
  j["kernel"] = kernel.spec.name;
  j["tolerance"] = tol;
  j["configs"] = static_cast<int64_t>(configs.size());
  j["failures"] = failures;
  j["passed"] = failures == 0;
  j["results"] = std::move(results);
  return j;
}

nlohmann::ordered_json SimulateReport(
    const CompiledKernel& kernel, const CatalogEntry* entry,
    const Binding& bind, uint64_t seed,
    const std::map<std::string, std::string>& input_files,
    const std::string& out_dir) {
  const SplitBindings split = SplitUserBindings(kernel, entry, bind);
  for (const auto& [name, path] : input_files) {
    (void)path;
    const bool known =
        std::any_of(kernel.spec.params.begin(), kernel.spec.params.end(),
                    [&](const ParamDecl& p) { return p.name == name; });
    if (!known) {
      Fail(ErrorCode::kInvalidArgument, "no parameter named '" + name + "'");
    }
  }
  Binding meta;
  TensorArgs args;
  Json dims_json = nullptr;
  if (entry) {
    VerifyConfig c;
    c.dims = split.dims;
    c.seed = seed;
    for (const auto& [name, v] : split.symbols) {
      if (!IsMeta(kernel.spec, kernel, name)) {
        Fail(ErrorCode::kInvalidArgument,
             "simulate binds problem dims and meta-parameters, not '" + name + "'");
      }
      c.meta[name] = v;
    }
    c = CompleteConfig(*entry, std::move(c));
    meta = c.meta;
    args = MakeArgs(*entry, c);
    dims_json = BindingJson(c.dims);
  } else {
    if (!split.dims.empty()) {
      Fail(ErrorCode::kInternal, "problem dims without a catalog entry");
    }
    meta = split.symbols;
  }
  for (const auto& [name, path] : input_files) {
    args.insert_or_assign(name, LoadTensorFile(path));
  }
  for (const ParamDecl& p : kernel.spec.params) {
    if (!args.count(p.name)) {
      Fail(ErrorCode::kInvalidArgument,
           "no tensor for parameter '" + p.name + "' (use --input " + p.name +
               "=PATH)");
    }
  }
  const std::string out_name = OutputParam(kernel.spec);
  const LaunchInfo info = Launch(kernel, args, meta);

  std::optional<Tensor> expected;
  if (entry) {
    TensorArgs inputs;
    for (const auto& [name, t] : args) {
      if (name != out_name) inputs.emplace(name, t);
    }
    expected = OracleEval(kernel.spec.name, inputs);
  }

  Json j;
  j["kernel"] = kernel.spec.name;
  j["programs"] = info.programs;
  j["meta"] = BindingJson(meta);
  j["dims"] = dims_json;
  j["seed"] = seed;
  j["output"] = out_name;
  j["output_shape"] = args.at(out_name).shape();
  if (expected) {
    const std::vector<float> got = args.at(out_name).ToVector();
    const std::vector<float> want = expected->ToVector();
    double max_abs = 0.0;
    for (size_t i = 0; i < got.size() && i < want.size(); ++i) {
      double d = std::fabs(static_cast<double>(got[i]) - want[i]);
      if (std::isnan(d)) d = INFINITY;
      max_abs = std::max(max_abs, d);
    }
    j["max_abs_vs_oracle"] =
        std::isfinite(max_abs) ? Json(max_abs) : Json("inf");
  }
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) Fail(ErrorCode::kIo, "cannot create '" + out_dir + "'");
    const std::filesystem::path dir(out_dir);
    Json files = Json::object();
    for (const auto& [name, t] : args) {
      const std::string path = (dir / (name + ".twt")).string();
      SaveTwt(t, path);
      files[name] = path;
    }
    if (expected) {
      const std::string path = (dir / (out_name + ".expected.twt")).string();
      SaveTwt(*expected, path);
      files[out_name + ".expected"] = path;
    }
    Json m;
    m["kernel"] = kernel.spec.name;
    m["meta"] = BindingJson(meta);
    m["dims"] = dims_json;
    m["seed"] = seed;
    m["output"] = out_name;
    Json shapes = Json::object();
    for (const auto& [name, t] : args) shapes[name] = t.shape();
    m["shapes"] = std::move(shapes);
    const std::string meta_path = (dir / "meta.json").string();
    WriteText(meta_path, m.dump(2) + "\n");
    files["meta"] = meta_path;
    j["files"] = std::move(files);
  }
  return j;
}

}  // namespace tw
