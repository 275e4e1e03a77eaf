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

// Dense-loop reference implementations of the catalog kernels. They share no
// code with the compiler or the simulator. Arithmetic is in double, rounded
// to f32 once per output element.

#ifndef TILEWRIGHT_SRC_ORACLE_H_
#define TILEWRIGHT_SRC_ORACLE_H_

#include <string>

#include "sim.h"
#include "tensor.h"

namespace tw {

inline constexpr double kRmsNormEps = 1e-6;

Tensor OracleAdd(const Tensor& a, const Tensor& b);
Tensor OracleSilu(const Tensor& x);
Tensor OracleSoftmax(const Tensor& x);  // along the last dim of a 2-D input
Tensor OracleRmsNorm(const Tensor& x, const Tensor& weight,
                     double eps = kRmsNormEps);  // weight is (1, N)
Tensor OracleMm(const Tensor& a, const Tensor& b);
Tensor OracleBmm(const Tensor& a, const Tensor& b);
Tensor OracleAddmm(const Tensor& c, const Tensor& a, const Tensor& b,
                   float beta, float alpha);
// Stride 1, no padding.
Tensor OracleConv2d(const Tensor& input, const Tensor& filter);

// (N, C, H, W) -> (N*P*Q, C*R*S) with P = H-R+1, Q = W-S+1.
Tensor Im2col(const Tensor& input, int64_t r, int64_t s);
// (K, C, R, S) -> (C*R*S, K).
Tensor FilterMatrix(const Tensor& filter);
// (N*P*Q, K) -> (N, K, P, Q).
Tensor FoldConvOutput(const Tensor& m, int64_t n, int64_t p, int64_t q);

// The output of catalog kernel `name` for the given inputs. Throws
// Error(kInvalidArgument) on inconsistent shapes.
Tensor OracleEval(const std::string& name, const TensorArgs& inputs);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_ORACLE_H_
