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

// Triton source generation from a compiled kernel.
//
// The output has three entry points: `{name}_kernel` (the @triton.jit
// function), `{name}_grid` (grid size from sizes and meta-parameters) and
// `{name}` (a launcher that reads sizes and strides off torch tensors,
// asserts the launch checks and runs the kernel on a 1-D grid).

#ifndef TILEWRIGHT_SRC_EMIT_H_
#define TILEWRIGHT_SRC_EMIT_H_

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tileir.h"

namespace tw {

struct KernelArgument {
  enum class Meaning { kPointer, kSize, kStride, kScalar, kMeta };
  std::string name;
  Meaning meaning = Meaning::kPointer;
  std::string param;  // empty for meta-parameters
  int dim = 0;        // sizes and strides
  bool constexpr_ = false;
};

const char* MeaningName(KernelArgument::Meaning m);

struct EmittedKernel {
  std::string source;
  std::string kernel_name;
  std::string grid_name;
  std::string launcher_name;
  std::vector<KernelArgument> arguments;  // kernel signature order
  std::vector<std::string> launcher_arguments;
  // Every symbolic expression rendered into the kernel body, and the names
  // the body defines before using them. Used to check that the emitted
  // expressions have no free variables beyond the arguments.
  std::vector<SymExpr> kernel_expressions;
  std::set<std::string> kernel_defined;
};

// Throws Error(kSpec) for constructs with no Triton lowering.
EmittedKernel EmitTriton(const CompiledKernel& kernel);

// The JSON sidecar describing the emitted entry points and arguments.
nlohmann::ordered_json ManifestJson(const CompiledKernel& kernel,
                                    const EmittedKernel& emitted);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_EMIT_H_
