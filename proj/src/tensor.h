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

// Concrete f32 tensors and their file formats.
//
// TWT1 binary layout: the bytes "TWT1", u32 rank, rank x u32 sizes, then the
// elements as f32, row-major, all little-endian. The JSON alternative is
// {"shape": [...], "data": [...]} with data row-major.

#ifndef TILEWRIGHT_SRC_TENSOR_H_
#define TILEWRIGHT_SRC_TENSOR_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tw {

class Tensor {
 public:
  // A rank-0 tensor holding 0.
  Tensor();
  // Row-major contiguous, filled with `fill`.
  explicit Tensor(std::vector<int64_t> shape, float fill = 0.0f);
  static Tensor Scalar(float value);
  static Tensor FromData(std::vector<int64_t> shape, std::vector<float> data);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int64_t>& shape() const { return shape_; }
  const std::vector<int64_t>& strides() const { return strides_; }
  int64_t numel() const;

  // The underlying buffer; views share it.
  float* buffer() { return storage_->data(); }
  const float* buffer() const { return storage_->data(); }
  int64_t buffer_size() const { return static_cast<int64_t>(storage_->size()); }

  float& At(std::span<const int64_t> index);
  float At(std::span<const int64_t> index) const;

  // A view with dims reordered; shares the buffer.
  Tensor Permuted(const std::vector<int>& order) const;
  // Deep copy, row-major contiguous.
  Tensor Contiguous() const;
  // Elements in row-major logical order.
  std::vector<float> ToVector() const;
  bool is_contiguous() const;

 private:
  int64_t Offset(std::span<const int64_t> index) const;

  std::shared_ptr<std::vector<float>> storage_;
  std::vector<int64_t> shape_;
  std::vector<int64_t> strides_;
};

// Calls fn(index) for every multi-index of `shape` in row-major order.
template <typename Fn>
void ForEachIndex(const std::vector<int64_t>& shape, Fn&& fn) {
  for (int64_t s : shape) {
    if (s <= 0) return;
  }
  std::vector<int64_t> idx(shape.size(), 0);
  while (true) {
    fn(std::span<const int64_t>(idx));
    int d = static_cast<int>(shape.size()) - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
    }
    if (d < 0) return;
  }
}

std::string EncodeTwt(const Tensor& t);
Tensor DecodeTwt(const std::string& bytes);
void SaveTwt(const Tensor& t, const std::string& path);
Tensor LoadTwt(const std::string& path);

nlohmann::ordered_json TensorToJson(const Tensor& t);
Tensor TensorFromJson(const nlohmann::ordered_json& j);

// Dispatches on the extension: .json is the JSON form, anything else TWT1.
Tensor LoadTensorFile(const std::string& path);
void SaveTensorFile(const Tensor& t, const std::string& path);

}  // namespace tw

#endif  // TILEWRIGHT_SRC_TENSOR_H_
