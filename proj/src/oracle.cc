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

#include "oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.h"

namespace tw {
namespace {

void Require(bool ok, const std::string& msg) {
  if (!ok) Fail(ErrorCode::kInvalidArgument, msg);
}

void RequireRank(const Tensor& t, int rank, const char* what) {
  Require(t.rank() == rank, std::string(what) + " must have rank " +
                                std::to_string(rank));
}

float Get(const Tensor& t, std::initializer_list<int64_t> idx) {
  return t.At(std::span<const int64_t>(idx.begin(), idx.size()));
}

void Set(Tensor& t, std::initializer_list<int64_t> idx, double v) {
  t.At(std::span<const int64_t>(idx.begin(), idx.size())) = static_cast<float>(v);
}

const Tensor& Arg(const TensorArgs& args, const std::string& name) {
  auto it = args.find(name);
  Require(it != args.end(), "missing input '" + name + "'");
  return it->second;
}

}  // namespace

Tensor OracleAdd(const Tensor& a, const Tensor& b) {
  RequireRank(a, 1, "add input");
  Require(a.shape() == b.shape(), "add operands differ in shape");
  Tensor out(a.shape());
  for (int64_t i = 0; i < a.shape()[0]; ++i) {
    Set(out, {i}, static_cast<double>(Get(a, {i})) + Get(b, {i}));
  }
  return out;
}

Tensor OracleSilu(const Tensor& x) {
  RequireRank(x, 1, "silu input");
  Tensor out(x.shape());
  for (int64_t i = 0; i < x.shape()[0]; ++i) {
    double v = Get(x, {i});
    Set(out, {i}, v / (1.0 + std::exp(-v)));
  }
  return out;
}

Tensor OracleSoftmax(const Tensor& x) {
  RequireRank(x, 2, "softmax input");
  const int64_t m = x.shape()[0], n = x.shape()[1];
  Tensor out(x.shape());
  for (int64_t i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int64_t j = 0; j < n; ++j) mx = std::max<double>(mx, Get(x, {i, j}));
    double denom = 0.0;
    for (int64_t j = 0; j < n; ++j) denom += std::exp(Get(x, {i, j}) - mx);
    for (int64_t j = 0; j < n; ++j) {
      Set(out, {i, j}, std::exp(Get(x, {i, j}) - mx) / denom);
    }
  }
  return out;
}

Tensor OracleRmsNorm(const Tensor& x, const Tensor& weight, double eps) {
  RequireRank(x, 2, "rms_norm input");
  RequireRank(weight, 2, "rms_norm weight");
  const int64_t m = x.shape()[0], n = x.shape()[1];
  Require(weight.shape()[0] == 1 && weight.shape()[1] == n,
          "rms_norm weight must be (1, N)");
  Tensor out(x.shape());
  for (int64_t i = 0; i < m; ++i) {
    double ss = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      double v = Get(x, {i, j});
      ss += v * v;
    }
    const double inv = 1.0 / std::sqrt(ss / static_cast<double>(n) + eps);
    for (int64_t j = 0; j < n; ++j) {
      Set(out, {i, j}, Get(x, {i, j}) * inv * Get(weight, {0, j}));
    }
  }
  return out;
}

Tensor OracleMm(const Tensor& a, const Tensor& b) {
  RequireRank(a, 2, "mm lhs");
  RequireRank(b, 2, "mm rhs");
  const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Require(b.shape()[0] == k, "mm inner dimensions differ");
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p) {
        acc += static_cast<double>(Get(a, {i, p})) * Get(b, {p, j});
      }
      Set(out, {i, j}, acc);
    }
  }
  return out;
}

Tensor OracleBmm(const Tensor& a, const Tensor& b) {
  RequireRank(a, 3, "bmm lhs");
  RequireRank(b, 3, "bmm rhs");
  const int64_t bs = a.shape()[0], m = a.shape()[1], k = a.shape()[2];
  const int64_t n = b.shape()[2];
  Require(b.shape()[0] == bs && b.shape()[1] == k, "bmm shapes differ");
  Tensor out({bs, m, n});
  for (int64_t z = 0; z < bs; ++z) {
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int64_t p = 0; p < k; ++p) {
          acc += static_cast<double>(Get(a, {z, i, p})) * Get(b, {z, p, j});
        }
        Set(out, {z, i, j}, acc);
      }
    }
  }
  return out;
}

Tensor OracleAddmm(const Tensor& c, const Tensor& a, const Tensor& b,
                   float beta, float alpha) {
  RequireRank(c, 2, "addmm input");
  RequireRank(a, 2, "addmm mat1");
  RequireRank(b, 2, "addmm mat2");
  const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Require(b.shape()[0] == k, "addmm inner dimensions differ");
  Require(c.shape()[0] == m && c.shape()[1] == n, "addmm input shape differs");
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int64_t p = 0; p < k; ++p) {
        acc += static_cast<double>(Get(a, {i, p})) * Get(b, {p, j});
      }
      Set(out, {i, j}, static_cast<double>(beta) * Get(c, {i, j}) +
                           static_cast<double>(alpha) * acc);
    }
  }
  return out;
}

Tensor OracleConv2d(const Tensor& input, const Tensor& filter) {
  RequireRank(input, 4, "conv2d input");
  RequireRank(filter, 4, "conv2d filter");
  const int64_t n = input.shape()[0], c = input.shape()[1];
  const int64_t h = input.shape()[2], w = input.shape()[3];
  const int64_t k = filter.shape()[0], r = filter.shape()[2], s = filter.shape()[3];
  Require(filter.shape()[1] == c, "conv2d channel counts differ");
  Require(r <= h && s <= w, "conv2d filter larger than input");
  const int64_t p = h - r + 1, q = w - s + 1;
  Tensor out({n, k, p, q});
  for (int64_t b = 0; b < n; ++b) {
    for (int64_t o = 0; o < k; ++o) {
      for (int64_t y = 0; y < p; ++y) {
        for (int64_t x = 0; x < q; ++x) {
          double acc = 0.0;
          for (int64_t ch = 0; ch < c; ++ch) {
            for (int64_t dy = 0; dy < r; ++dy) {
              for (int64_t dx = 0; dx < s; ++dx) {
                acc += static_cast<double>(Get(input, {b, ch, y + dy, x + dx})) *
                       Get(filter, {o, ch, dy, dx});
              }
            }
          }
          Set(out, {b, o, y, x}, acc);
        }
      }
    }
  }
  return out;
}

Tensor Im2col(const Tensor& input, int64_t r, int64_t s) {
  RequireRank(input, 4, "im2col input");
  const int64_t n = input.shape()[0], c = input.shape()[1];
  const int64_t p = input.shape()[2] - r + 1, q = input.shape()[3] - s + 1;
  Require(p > 0 && q > 0, "im2col window larger than input");
  Tensor out({n * p * q, c * r * s});
  for (int64_t b = 0; b < n; ++b) {
    for (int64_t y = 0; y < p; ++y) {
      for (int64_t x = 0; x < q; ++x) {
        const int64_t row = (b * p + y) * q + x;
        for (int64_t ch = 0; ch < c; ++ch) {
          for (int64_t dy = 0; dy < r; ++dy) {
            for (int64_t dx = 0; dx < s; ++dx) {
              const int64_t col = (ch * r + dy) * s + dx;
              Set(out, {row, col}, Get(input, {b, ch, y + dy, x + dx}));
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor FilterMatrix(const Tensor& filter) {
  RequireRank(filter, 4, "filter");
  const int64_t k = filter.shape()[0], c = filter.shape()[1];
  const int64_t r = filter.shape()[2], s = filter.shape()[3];
  Tensor out({c * r * s, k});
  for (int64_t o = 0; o < k; ++o) {
    for (int64_t ch = 0; ch < c; ++ch) {
      for (int64_t dy = 0; dy < r; ++dy) {
        for (int64_t dx = 0; dx < s; ++dx) {
          Set(out, {(ch * r + dy) * s + dx, o}, Get(filter, {o, ch, dy, dx}));
        }
      }
    }
  }
  return out;
}

Tensor FoldConvOutput(const Tensor& m, int64_t n, int64_t p, int64_t q) {
  RequireRank(m, 2, "conv matrix");
  Require(m.shape()[0] == n * p * q, "conv matrix rows differ");
  const int64_t k = m.shape()[1];
  Tensor out({n, k, p, q});
  for (int64_t b = 0; b < n; ++b) {
    for (int64_t o = 0; o < k; ++o) {
      for (int64_t y = 0; y < p; ++y) {
        for (int64_t x = 0; x < q; ++x) {
          Set(out, {b, o, y, x}, Get(m, {(b * p + y) * q + x, o}));
        }
      }
    }
  }
  return out;
}

Tensor OracleEval(const std::string& name, const TensorArgs& in) {
  if (name == "add") return OracleAdd(Arg(in, "input"), Arg(in, "other"));
  if (name == "silu") return OracleSilu(Arg(in, "input"));
  if (name == "softmax") return OracleSoftmax(Arg(in, "input"));
  if (name == "rms_norm") return OracleRmsNorm(Arg(in, "input"), Arg(in, "weight"));
  if (name == "mm") return OracleMm(Arg(in, "input"), Arg(in, "other"));
  if (name == "bmm") return OracleBmm(Arg(in, "input"), Arg(in, "other"));
  if (name == "addmm") {
    const Tensor& beta = Arg(in, "beta");
    const Tensor& alpha = Arg(in, "alpha");
    RequireRank(beta, 0, "beta");
    RequireRank(alpha, 0, "alpha");
    return OracleAddmm(Arg(in, "input"), Arg(in, "mat1"), Arg(in, "mat2"),
                       beta.buffer()[0], alpha.buffer()[0]);
  }
  if (name == "conv2d") return OracleConv2d(Arg(in, "input"), Arg(in, "filter"));
  if (name == "sdpa" || name == "rope") {
    Fail(ErrorCode::kOutOfScope, "kernel '" + name + "' is out of scope");
  }
  Fail(ErrorCode::kInvalidArgument, "no oracle for kernel '" + name + "'");
}

}  // namespace tw
