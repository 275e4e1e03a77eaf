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

#include "tilewright/tilewright.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "catalog.h"
#include "driver.h"
#include "emit.h"
#include "error.h"
#include "oracle.h"
#include "sim.h"
#include "spec_json.h"
#include "tensor.h"
#include "tileir.h"

struct tw_kernel {
  tw::CompiledKernel compiled;
  const tw::CatalogEntry* entry = nullptr;  // set when the spec is a catalog one
};

struct tw_tensor {
  tw::Tensor tensor;
};

namespace {

using Json = nlohmann::ordered_json;

thread_local std::string g_last_error;

tw_status SetError(tw_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <typename Fn>
tw_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return TW_OK;
  } catch (const tw::Error& e) {
    return SetError(static_cast<tw_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return SetError(TW_ERROR_INVALID_ARGUMENT, std::string("JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return SetError(TW_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(TW_ERROR_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) tw::Fail(tw::ErrorCode::kInvalidArgument, what);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

Json ParseObject(const char* text, const char* what) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    tw::Fail(tw::ErrorCode::kInvalidArgument,
             std::string("malformed ") + what + ": " + e.what());
  }
  if (!j.is_object()) {
    tw::Fail(tw::ErrorCode::kInvalidArgument, std::string(what) + " must be a JSON object");
  }
  return j;
}

tw::Binding ParseBinding(const Json& j, const char* what) {
  tw::Binding b;
  if (j.is_null()) return b;
  if (!j.is_object()) {
    tw::Fail(tw::ErrorCode::kInvalidArgument, std::string(what) + " must be an object");
  }
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number_integer()) {
      tw::Fail(tw::ErrorCode::kInvalidArgument,
               std::string(what) + " value for '" + k + "' must be an integer");
    }
    b[k] = v.get<int64_t>();
  }
  return b;
}

tw_kernel* MakeKernel(const tw::KernelSpec& spec) {
  auto k = std::make_unique<tw_kernel>();
  k->compiled = tw::Compile(spec);
  const tw::CatalogEntry* e = tw::FindCatalogEntry(spec.name);
  if (e && tw::SerializeSpecText(e->spec) == tw::SerializeSpecText(spec)) {
    k->entry = e;
  }
  return k.release();
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) tw::Fail(tw::ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

tw::TensorArgs CollectArgs(size_t count, const char* const* names,
                           const tw_tensor* const* tensors) {
  Require(count == 0 || (names && tensors), "names and tensors are required");
  tw::TensorArgs args;
  for (size_t i = 0; i < count; ++i) {
    Require(names[i] && tensors[i], "null name or tensor");
    if (!args.emplace(names[i], tensors[i]->tensor).second) {
      tw::Fail(tw::ErrorCode::kInvalidArgument,
               std::string("duplicate argument '") + names[i] + "'");
    }
  }
  return args;
}

}  // namespace

extern "C" {

const char* tw_version(void) { return "0.1.0"; }

const char* tw_status_name(tw_status status) {
  switch (status) {
    case TW_OK: return "ok";
    case TW_ERROR_INVALID_ARGUMENT: return "invalid_argument";
    case TW_ERROR_SPEC: return "spec";
    case TW_ERROR_OUT_OF_SCOPE: return "out_of_scope";
    case TW_ERROR_LAUNCH: return "launch";
    case TW_ERROR_IO: return "io";
    case TW_ERROR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tw_last_error(void) { return g_last_error.c_str(); }

void tw_string_free(char* s) { std::free(s); }

tw_status tw_catalog_names(char** out_json) {
  return Guard([&] {
    Require(out_json, "out_json is null");
    *out_json = CopyString(Json(tw::CatalogNames()).dump());
  });
}

tw_status tw_kernel_from_catalog(const char* name, tw_kernel** out) {
  return Guard([&] {
    Require(name && out, "name and out are required");
    *out = MakeKernel(tw::CatalogSpec(name));
  });
}

tw_status tw_kernel_from_json(const char* json, tw_kernel** out) {
  return Guard([&] {
    Require(json && out, "json and out are required");
    *out = MakeKernel(tw::ParseSpecText(json));
  });
}

tw_status tw_kernel_from_file(const char* path, tw_kernel** out) {
  return Guard([&] {
    Require(path && out, "path and out are required");
    *out = MakeKernel(tw::ParseSpecText(ReadFile(path)));
  });
}

tw_status tw_kernel_open(const char* name_or_path, tw_kernel** out) {
  if (!name_or_path) {
    return SetError(TW_ERROR_INVALID_ARGUMENT, "name_or_path is null");
  }
  const std::string s = name_or_path;
  const bool looks_like_path = s.find('/') != std::string::npos ||
                               s.find('.') != std::string::npos;
  return looks_like_path ? tw_kernel_from_file(name_or_path, out)
                         : tw_kernel_from_catalog(name_or_path, out);
}

void tw_kernel_free(tw_kernel* kernel) { delete kernel; }

tw_status tw_kernel_name(const tw_kernel* kernel, char** out) {
  return Guard([&] {
    Require(kernel && out, "kernel and out are required");
    *out = CopyString(kernel->compiled.spec.name);
  });
}

tw_status tw_kernel_to_json(const tw_kernel* kernel, char** out_json) {
  return Guard([&] {
    Require(kernel && out_json, "kernel and out_json are required");
    *out_json = CopyString(tw::SerializeSpecText(kernel->compiled.spec));
  });
}

tw_status tw_kernel_inspect(const tw_kernel* kernel, const char* bindings_json,
                            char** out_report_json) {
  return Guard([&] {
    Require(kernel && out_report_json, "kernel and out are required");
    const tw::Binding b = ParseBinding(ParseObject(bindings_json, "bindings"), "bindings");
    *out_report_json =
        CopyString(tw::InspectReport(kernel->compiled, kernel->entry, b).dump(2));
  });
}

tw_status tw_kernel_emit(const tw_kernel* kernel, char** out_source,
                         char** out_manifest_json) {
  return Guard([&] {
    Require(kernel, "kernel is null");
    const tw::EmittedKernel e = tw::EmitTriton(kernel->compiled);
    std::string manifest = tw::ManifestJson(kernel->compiled, e).dump(2) + "\n";
    char* src = out_source ? CopyString(e.source) : nullptr;
    if (out_manifest_json) {
      try {
        *out_manifest_json = CopyString(manifest);
      } catch (...) {
        std::free(src);
        throw;
      }
    }
    if (out_source) *out_source = src;
  });
}

tw_status tw_tensor_create(int32_t rank, const int64_t* shape, const float* data,
                           tw_tensor** out) {
  return Guard([&] {
    Require(out, "out is null");
    Require(rank >= 0 && rank <= 16, "rank must be in [0, 16]");
    Require(rank == 0 || shape, "shape is null");
    std::vector<int64_t> dims(shape, shape + rank);
    auto t = std::make_unique<tw_tensor>();
    t->tensor = rank == 0 ? tw::Tensor::Scalar(0.0f) : tw::Tensor(dims);
    if (data) {
      std::memcpy(t->tensor.buffer(), data,
                  sizeof(float) * static_cast<size_t>(t->tensor.numel()));
    }
    *out = t.release();
  });
}

void tw_tensor_free(tw_tensor* tensor) { delete tensor; }

int32_t tw_tensor_rank(const tw_tensor* tensor) {
  return tensor ? tensor->tensor.rank() : -1;
}

const int64_t* tw_tensor_shape(const tw_tensor* tensor) {
  return tensor ? tensor->tensor.shape().data() : nullptr;
}

int64_t tw_tensor_numel(const tw_tensor* tensor) {
  return tensor ? tensor->tensor.numel() : -1;
}

float* tw_tensor_data(tw_tensor* tensor) {
  return tensor ? tensor->tensor.buffer() : nullptr;
}

tw_status tw_tensor_load(const char* path, tw_tensor** out) {
  return Guard([&] {
    Require(path && out, "path and out are required");
    auto t = std::make_unique<tw_tensor>();
    t->tensor = tw::LoadTensorFile(path);
    *out = t.release();
  });
}

tw_status tw_tensor_save(const tw_tensor* tensor, const char* path) {
  return Guard([&] {
    Require(tensor && path, "tensor and path are required");
    tw::SaveTensorFile(tensor->tensor, path);
  });
}

tw_status tw_kernel_launch(const tw_kernel* kernel, size_t count,
                           const char* const* names, tw_tensor* const* tensors,
                           const char* meta_json, int64_t* out_programs) {
  return Guard([&] {
    Require(kernel, "kernel is null");
    tw::TensorArgs args = CollectArgs(count, names, tensors);
    const tw::Binding meta = ParseBinding(ParseObject(meta_json, "meta"), "meta");
    const tw::LaunchInfo info = tw::Launch(kernel->compiled, args, meta);
    if (out_programs) *out_programs = info.programs;
  });
}

tw_status tw_oracle_eval(const char* kernel_name, size_t count,
                         const char* const* names,
                         const tw_tensor* const* tensors, tw_tensor** out) {
  return Guard([&] {
    Require(kernel_name && out, "kernel_name and out are required");
    const tw::TensorArgs args = CollectArgs(count, names, tensors);
    auto t = std::make_unique<tw_tensor>();
    t->tensor = tw::OracleEval(kernel_name, args);
    *out = t.release();
  });
}

tw_status tw_kernel_verify(const tw_kernel* kernel, const char* request_json,
                           char** out_report_json) {
  return Guard([&] {
    Require(kernel && out_report_json, "kernel and out are required");
    const Json req = ParseObject(request_json, "verify request");
    if (!kernel->entry) {
      tw::CatalogEntryFor(kernel->compiled.spec.name);  // out-of-scope names
      tw::Fail(tw::ErrorCode::kInvalidArgument,
               "verify needs a catalog kernel; '" + kernel->compiled.spec.name +
                   "' has no reference implementation");
    }
    const tw::Binding bind = ParseBinding(req.value("bind", Json()), "bind");
    const uint64_t seed = req.value("seed", uint64_t{0});
    std::optional<double> tol;
    if (req.contains("tolerance") && !req["tolerance"].is_null()) {
      Require(req["tolerance"].is_number() && req["tolerance"].get<double>() >= 0,
              "tolerance must be a non-negative number");
      tol = req["tolerance"].get<double>();
    }
    const bool all = req.value("all", false);
    *out_report_json = CopyString(
        tw::VerifyReport(kernel->compiled, *kernel->entry, bind, seed, tol, all)
            .dump(2));
  });
}

tw_status tw_kernel_simulate(const tw_kernel* kernel, const char* request_json,
                             char** out_report_json) {
  return Guard([&] {
    Require(kernel && out_report_json, "kernel and out are required");
    const Json req = ParseObject(request_json, "simulate request");
    const tw::Binding bind = ParseBinding(req.value("bind", Json()), "bind");
    const uint64_t seed = req.value("seed", uint64_t{0});
    std::map<std::string, std::string> inputs;
    if (req.contains("inputs")) {
      Require(req["inputs"].is_object(), "inputs must be an object");
      for (const auto& [k, v] : req["inputs"].items()) {
        Require(v.is_string(), "input paths must be strings");
        inputs[k] = v.get<std::string>();
      }
    }
    const std::string out_dir = req.value("out_dir", std::string());
    *out_report_json = CopyString(
        tw::SimulateReport(kernel->compiled, kernel->entry, bind, seed, inputs,
                           out_dir)
            .dump(2));
  });
}

}  // extern "C"
