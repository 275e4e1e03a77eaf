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

// CPU interpreter for compiled kernels. Every program of the grid runs the
// application over f32 tiles; loads and stores go through the same IndexMap
// offset and mask expressions the emitter renders.

#ifndef TILEWRIGHT_SRC_SIM_H_
#define TILEWRIGHT_SRC_SIM_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tensor.h"
#include "tileir.h"

namespace tw {

// Parameters by name. Tensors share their buffers, so outputs written by a
// launch are visible through the caller's tensors.
using TensorArgs = std::map<std::string, Tensor>;

struct LaunchOptions {
  bool reverse = false;  // run programs from the last pid down
  int threads = 1;
  // Called for every unmasked store with the parameter, the buffer offset
  // and the program id. Must be thread-safe when threads > 1.
  std::function<void(const std::string& param, int64_t offset, int64_t pid)>
      on_store;
};

struct LaunchInfo {
  Binding binding;  // meta plus every size and stride
  int64_t programs = 0;
};

// Builds the launch binding and checks arguments, meta values and the
// recorded shape checks. Throws Error(kLaunch) on a violation.
Binding LaunchBinding(const CompiledKernel& kernel, const TensorArgs& args,
                      const Binding& meta);

LaunchInfo Launch(const CompiledKernel& kernel, TensorArgs& args,
                  const Binding& meta, const LaunchOptions& options = {});

// Meta symbols a launch must bind: constexpr symbols other than sizes.
std::vector<std::string> RequiredMeta(const CompiledKernel& kernel);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_SIM_H_
