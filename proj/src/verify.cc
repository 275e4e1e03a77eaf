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

#include "verify.h"

#include <cmath>
#include <limits>
#include <mutex>

#include "error.h"
#include "oracle.h"

namespace tw {
namespace {

uint64_t NameHash(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::ordered_json BindingJson(const Binding& b) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : b) j[k] = v;
  return j;
}

}  // namespace

double DefaultTolerance(const CatalogEntry& entry) {
  return entry.kernel_class == KernelClass::kElementwise ? kElementwiseTolerance
                                                         : kReductionTolerance;
}

float UniformSigned(std::mt19937_64& rng) {
  // 24 random bits mapped to the open interval (-1, 1).
  const uint64_t bits = rng() >> 40;
  return static_cast<float>((static_cast<double>(bits) + 0.5) / 8388608.0 - 1.0);
}

std::map<std::string, std::vector<int64_t>> ProblemShapes(
    const CatalogEntry& entry, const Binding& dims) {
  std::map<std::string, std::vector<int64_t>> out;
  for (const ParamDecl& p : entry.spec.params) {
    std::vector<int64_t>& shape = out[p.name];
    if (p.is_scalar()) continue;
    auto it = entry.shapes.find(p.name);
    if (it == entry.shapes.end()) {
      Fail(ErrorCode::kInternal, "no problem shape for '" + p.name + "'");
    }
    for (const SymExpr& e : it->second) {
      const int64_t v = Eval(e, dims);
      if (v < 1) {
        Fail(ErrorCode::kInvalidArgument,
             "dims give '" + p.name + "' a non-positive size");
      }
      shape.push_back(v);
    }
  }
  return out;
}

TensorArgs MakeArgs(const CatalogEntry& entry, const VerifyConfig& config) {
  std::mt19937_64 rng(config.seed);
  TensorArgs args;
  const auto shapes = ProblemShapes(entry, config.dims);
  for (const ParamDecl& p : entry.spec.params) {
    const std::vector<int64_t>& shape = shapes.at(p.name);
    if (p.role == Role::kOut) {
      args.emplace(p.name, Tensor(shape));
      continue;
    }
    if (p.is_scalar()) {
      args.emplace(p.name, Tensor::Scalar(UniformSigned(rng)));
      continue;
    }
    Tensor t(shape);
    float* data = t.buffer();
    const bool rows = config.constant_rows && p.rank == 2 && p.name == "input";
    const int64_t cols = shape.back();
    float row_value = 0.0f;
    for (int64_t i = 0; i < t.numel(); ++i) {
      if (rows) {
        if (i % cols == 0) row_value = UniformSigned(rng);
        data[i] = row_value;
      } else {
        data[i] = UniformSigned(rng);
      }
    }
    args.emplace(p.name, std::move(t));
  }
  return args;
}

VerifyConfig CompleteConfig(const CatalogEntry& entry, VerifyConfig config) {
  for (const auto& [k, v] : entry.default_dims) config.dims.emplace(k, v);
  for (const std::string& d : entry.dims) {
    if (!config.dims.count(d)) {
      Fail(ErrorCode::kInvalidArgument, "problem dim '" + d + "' is not bound");
    }
  }
  for (const auto& [k, v] : entry.default_meta) config.meta.emplace(k, v);
  if (entry.derived_meta) {
    for (const auto& [k, v] : entry.derived_meta(config.dims)) {
      config.meta.emplace(k, v);
    }
  }
  return config;
}

std::vector<VerifyConfig> ConfigMatrix(const CatalogEntry& entry, uint64_t seed,
                                       int count) {
  std::vector<VerifyConfig> out;
  std::mt19937_64 rng(seed ^ NameHash(entry.spec.name));
  for (int i = 0; i < count; ++i) {
    VerifyConfig c;
    if (i > 0) {
      c.dims = entry.random_dims(rng);
      for (const std::string& m : entry.block_meta) {
        c.meta[m] = kBlockSizes[rng() % std::size(kBlockSizes)];
      }
      c.constant_rows = entry.constant_rows && i % 4 == 3;
    }
    c.seed = rng();
    out.push_back(CompleteConfig(entry, std::move(c)));
  }
  return out;
}

std::string OutputParam(const KernelSpec& spec) {
  for (const ParamDecl& p : spec.params) {
    if (p.role == Role::kOut) return p.name;
  }
  Fail(ErrorCode::kSpec, "kernel '" + spec.name + "' has no output");
}

VerifyResult VerifyKernel(const CompiledKernel& kernel,
                          const CatalogEntry& entry, const VerifyConfig& config,
                          double tolerance, const LaunchOptions& options) {
  VerifyResult r;
  r.kernel = entry.spec.name;
  r.config = config;
  r.tolerance = tolerance;

  TensorArgs args = MakeArgs(entry, config);
  const std::string out_name = OutputParam(kernel.spec);
  Tensor out = args.at(out_name);

  std::vector<int> writes(out.buffer_size(), 0);
  std::mutex mu;
  LaunchOptions opts = options;
  auto user_hook = options.on_store;
  opts.on_store = [&](const std::string& param, int64_t off, int64_t pid) {
    if (param == out_name) {
      std::lock_guard<std::mutex> lock(mu);
      ++writes[off];
    }
    if (user_hook) user_hook(param, off, pid);
  };
  r.programs = Launch(kernel, args, config.meta, opts).programs;
  r.coverage_ok = std::all_of(writes.begin(), writes.end(),
                              [](int w) { return w == 1; });

  TensorArgs inputs;
  for (const auto& [name, t] : args) {
    if (name != out_name) inputs.emplace(name, t);
  }
  const Tensor expected = OracleEval(entry.spec.name, inputs);
  const std::vector<float> got = out.ToVector();
  const std::vector<float> want = expected.ToVector();
  if (got.size() != want.size()) {
    Fail(ErrorCode::kInternal, "oracle and simulator outputs differ in size");
  }
  for (size_t i = 0; i < got.size(); ++i) {
    double d = std::fabs(static_cast<double>(got[i]) - want[i]);
    if (std::isnan(d)) d = std::numeric_limits<double>::infinity();
    r.max_abs = std::max(r.max_abs, d);
    r.max_rel = std::max(r.max_rel, d / std::max(std::fabs(double{want[i]}), 1e-6));
  }
  r.within_tolerance = r.max_abs <= tolerance;
  return r;
}

nlohmann::ordered_json VerifyResultJson(const VerifyResult& r) {
  nlohmann::ordered_json j;
  j["kernel"] = r.kernel;
  j["dims"] = BindingJson(r.config.dims);
  j["meta"] = BindingJson(r.config.meta);
  j["constant_rows"] = r.config.constant_rows;
  j["seed"] = r.config.seed;
  j["programs"] = r.programs;
  j["max_abs"] = std::isfinite(r.max_abs) ? nlohmann::ordered_json(r.max_abs)
                                          : nlohmann::ordered_json("inf");
  j["max_rel"] = std::isfinite(r.max_rel) ? nlohmann::ordered_json(r.max_rel)
                                          : nlohmann::ordered_json("inf");
  j["tolerance"] = r.tolerance;
  j["coverage_ok"] = r.coverage_ok;
  j["passed"] = r.passed();
  return j;
}

}  // namespace tw
