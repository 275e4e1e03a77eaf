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

#include "tensor.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.h"

namespace tw {
namespace {

constexpr char kMagic[4] = {'T', 'W', 'T', '1'};
// Guards against absurd headers; 1 Gi elements.
constexpr int64_t kMaxElements = int64_t{1} << 30;

std::vector<int64_t> RowMajorStrides(const std::vector<int64_t>& shape) {
  std::vector<int64_t> strides(shape.size(), 1);
  for (size_t i = shape.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * shape[i];
  }
  return strides;
}

int64_t CheckedNumel(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t s : shape) {
    if (s < 0) Fail(ErrorCode::kInvalidArgument, "negative tensor size");
    if (s != 0 && n > kMaxElements / s) {
      Fail(ErrorCode::kInvalidArgument, "tensor too large");
    }
    n *= s;
  }
  return n;
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(const std::string& in, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return v;
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Tensor::Tensor() : storage_(std::make_shared<std::vector<float>>(1, 0.0f)) {}

Tensor::Tensor(std::vector<int64_t> shape, float fill)
    : storage_(std::make_shared<std::vector<float>>(CheckedNumel(shape), fill)),
      shape_(std::move(shape)),
      strides_(RowMajorStrides(shape_)) {}

Tensor Tensor::Scalar(float value) {
  Tensor t;
  (*t.storage_)[0] = value;
  return t;
}

Tensor Tensor::FromData(std::vector<int64_t> shape, std::vector<float> data) {
  Tensor t(std::move(shape));
  if (static_cast<int64_t>(data.size()) != t.numel()) {
    Fail(ErrorCode::kInvalidArgument,
         "tensor data has " + std::to_string(data.size()) +
             " elements, shape needs " + std::to_string(t.numel()));
  }
  *t.storage_ = std::move(data);
  return t;
}

int64_t Tensor::numel() const {
  int64_t n = 1;
  for (int64_t s : shape_) n *= s;
  return n;
}

int64_t Tensor::Offset(std::span<const int64_t> index) const {
  if (index.size() != shape_.size()) {
    Fail(ErrorCode::kInvalidArgument, "index rank mismatch");
  }
  int64_t off = 0;
  for (size_t d = 0; d < shape_.size(); ++d) {
    if (index[d] < 0 || index[d] >= shape_[d]) {
      Fail(ErrorCode::kInvalidArgument, "index out of range");
    }
    off += index[d] * strides_[d];
  }
  return off;
}

float& Tensor::At(std::span<const int64_t> index) {
  return (*storage_)[Offset(index)];
}

float Tensor::At(std::span<const int64_t> index) const {
  return (*storage_)[Offset(index)];
}

Tensor Tensor::Permuted(const std::vector<int>& order) const {
  if (order.size() != shape_.size()) {
    Fail(ErrorCode::kInvalidArgument, "permutation rank mismatch");
  }
  std::vector<bool> seen(order.size(), false);
  Tensor t = *this;
  for (size_t i = 0; i < order.size(); ++i) {
    int o = order[i];
    if (o < 0 || o >= rank() || seen[o]) {
      Fail(ErrorCode::kInvalidArgument, "invalid permutation");
    }
    seen[o] = true;
    t.shape_[i] = shape_[o];
    t.strides_[i] = strides_[o];
  }
  return t;
}

std::vector<float> Tensor::ToVector() const {
  std::vector<float> out;
  out.reserve(numel());
  ForEachIndex(shape_, [&](std::span<const int64_t> idx) {
    out.push_back(At(idx));
  });
  return out;
}

Tensor Tensor::Contiguous() const { return FromData(shape_, ToVector()); }

bool Tensor::is_contiguous() const {
  return strides_ == RowMajorStrides(shape_) &&
         buffer_size() == numel();
}

std::string EncodeTwt(const Tensor& t) {
  std::string out(kMagic, 4);
  PutU32(out, static_cast<uint32_t>(t.rank()));
  for (int64_t s : t.shape()) {
    if (s > std::numeric_limits<uint32_t>::max()) {
      Fail(ErrorCode::kIo, "tensor dim too large for TWT1");
    }
    PutU32(out, static_cast<uint32_t>(s));
  }
  for (float v : t.ToVector()) PutU32(out, std::bit_cast<uint32_t>(v));
  return out;
}

Tensor DecodeTwt(const std::string& bytes) {
  if (bytes.size() < 8 || bytes.compare(0, 4, kMagic, 4) != 0) {
    Fail(ErrorCode::kIo, "not a TWT1 tensor file");
  }
  const uint32_t rank = GetU32(bytes, 4);
  if (rank > 16) Fail(ErrorCode::kIo, "TWT1 rank too large");
  const size_t header = 8 + 4 * static_cast<size_t>(rank);
  if (bytes.size() < header) Fail(ErrorCode::kIo, "truncated TWT1 header");
  std::vector<int64_t> shape(rank);
  for (uint32_t i = 0; i < rank; ++i) shape[i] = GetU32(bytes, 8 + 4 * i);
  int64_t n = 0;
  try {
    n = CheckedNumel(shape);
  } catch (const Error& e) {
    Fail(ErrorCode::kIo, std::string("TWT1: ") + e.what());
  }
  if (bytes.size() != header + 4 * static_cast<size_t>(n)) {
    Fail(ErrorCode::kIo, "TWT1 payload has " +
                             std::to_string(bytes.size() - header) +
                             " bytes, expected " + std::to_string(4 * n));
  }
  std::vector<float> data(n);
  for (int64_t i = 0; i < n; ++i) {
    data[i] = std::bit_cast<float>(GetU32(bytes, header + 4 * i));
  }
  return Tensor::FromData(std::move(shape), std::move(data));
}

void SaveTwt(const Tensor& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  const std::string bytes = EncodeTwt(t);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) Fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

namespace {
std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}
}  // namespace

Tensor LoadTwt(const std::string& path) { return DecodeTwt(ReadFile(path)); }

nlohmann::ordered_json TensorToJson(const Tensor& t) {
  nlohmann::ordered_json j;
  j["shape"] = t.shape();
  auto data = nlohmann::ordered_json::array();
  for (float v : t.ToVector()) {
    if (std::isfinite(v)) {
      data.push_back(v);
    } else {
      data.push_back(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
    }
  }
  j["data"] = std::move(data);
  return j;
}

Tensor TensorFromJson(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data") ||
      !j["shape"].is_array() || !j["data"].is_array()) {
    Fail(ErrorCode::kIo, "tensor JSON needs array fields 'shape' and 'data'");
  }
  std::vector<int64_t> shape;
  for (const auto& s : j["shape"]) {
    if (!s.is_number_integer() || s.get<int64_t>() < 0) {
      Fail(ErrorCode::kIo, "tensor JSON shape entries must be non-negative integers");
    }
    shape.push_back(s.get<int64_t>());
  }
  std::vector<float> data;
  for (const auto& v : j["data"]) {
    if (v.is_number()) {
      data.push_back(v.get<float>());
    } else if (v == "inf") {
      data.push_back(std::numeric_limits<float>::infinity());
    } else if (v == "-inf") {
      data.push_back(-std::numeric_limits<float>::infinity());
    } else if (v == "nan") {
      data.push_back(std::numeric_limits<float>::quiet_NaN());
    } else {
      Fail(ErrorCode::kIo, "tensor JSON data entries must be numbers");
    }
  }
  try {
    return Tensor::FromData(std::move(shape), std::move(data));
  } catch (const Error& e) {
    Fail(ErrorCode::kIo, e.what());
  }
}

Tensor LoadTensorFile(const std::string& path) {
  if (EndsWith(path, ".json")) {
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(ReadFile(path));
    } catch (const nlohmann::ordered_json::parse_error& e) {
      Fail(ErrorCode::kIo, "malformed tensor JSON '" + path + "': " + e.what());
    }
    return TensorFromJson(j);
  }
  return LoadTwt(path);
}

void SaveTensorFile(const Tensor& t, const std::string& path) {
  if (!EndsWith(path, ".json")) {
    SaveTwt(t, path);
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  f << TensorToJson(t).dump() << "\n";
  if (!f) Fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace tw
