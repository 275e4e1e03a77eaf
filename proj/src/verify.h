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

// Simulator-versus-oracle verification of catalog kernels.

#ifndef TILEWRIGHT_SRC_VERIFY_H_
#define TILEWRIGHT_SRC_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catalog.h"
#include "sim.h"

namespace tw {

inline constexpr double kElementwiseTolerance = 1e-5;
inline constexpr double kReductionTolerance = 1e-4;
inline constexpr int kMatrixConfigs = 24;

double DefaultTolerance(const CatalogEntry& entry);

struct VerifyConfig {
  Binding dims;
  Binding meta;
  bool constant_rows = false;
  uint64_t seed = 0;
};

struct VerifyResult {
  std::string kernel;
  VerifyConfig config;
  int64_t programs = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = false;
  // Every output element written by exactly one program.
  bool coverage_ok = false;
  bool passed() const { return within_tolerance && coverage_ok; }
};

// Uniform in (-1, 1) from a 64-bit generator, identical on every platform.
float UniformSigned(std::mt19937_64& rng);

// Concrete shape of each tensor parameter (rank 0 for scalars).
std::map<std::string, std::vector<int64_t>> ProblemShapes(
    const CatalogEntry& entry, const Binding& dims);

// Seeded inputs; outputs are zero-filled.
TensorArgs MakeArgs(const CatalogEntry& entry, const VerifyConfig& config);

// Defaults completed: missing dims and meta from the entry defaults, derived
// meta recomputed from the dims.
VerifyConfig CompleteConfig(const CatalogEntry& entry, VerifyConfig config);

// Config 0 is the entry's default; the rest are drawn from `seed`.
std::vector<VerifyConfig> ConfigMatrix(const CatalogEntry& entry, uint64_t seed,
                                       int count = kMatrixConfigs);

// The output parameter of a catalog kernel.
std::string OutputParam(const KernelSpec& spec);

VerifyResult VerifyKernel(const CompiledKernel& kernel,
                          const CatalogEntry& entry, const VerifyConfig& config,
                          double tolerance, const LaunchOptions& options = {});

nlohmann::ordered_json VerifyResultJson(const VerifyResult& r);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_VERIFY_H_
