/* Copyright 2026 The ARGAN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "training/image_pool.hpp"

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

ImagePool::ImagePool(int capacity) : capacity_(capacity) {
  Require(capacity >= 0, "pool size must be non-negative");
}

torch::Tensor ImagePool::PushSample(const torch::Tensor& image, Rng& rng, bool* swapped) {
  if (swapped) *swapped = false;
  if (capacity_ == 0) return image;
  auto stored = image.detach().clone();
  if (size() < capacity_) {
    images_.push_back(stored);
    return image;
  }
  if (Bernoulli(rng, 0.5)) return image;
  const auto k = UniformIndex(rng, images_.size());
  auto out = images_[k];
  images_[k] = stored;
  if (swapped) *swapped = true;
  return out;
}

torch::Tensor ImagePool::PushSampleBatch(const torch::Tensor& batch, Rng& rng) {
  if (capacity_ == 0) return batch;
  std::vector<torch::Tensor> out;
  out.reserve(static_cast<size_t>(batch.size(0)));
  for (int64_t i = 0; i < batch.size(0); ++i) out.push_back(PushSample(batch[i].detach(), rng));
  return torch::stack(out);
}

void ImagePool::Put(Archive& archive, const std::string& prefix) const {
  archive.PutText(prefix + "count", FormatInt(size()));
  for (size_t i = 0; i < images_.size(); ++i) archive.PutTensor(prefix + FormatInt(static_cast<int64_t>(i)), images_[i]);
}

void ImagePool::Get(const Archive& archive, const std::string& prefix) {
  const auto n = ParseInt(archive.Text(prefix + "count"));
  Require(n >= 0 && n <= capacity_, "pool checkpoint holds more images than its capacity", ErrorCode::kParse);
  images_.clear();
  for (int64_t i = 0; i < n; ++i) images_.push_back(archive.Tensor(prefix + FormatInt(i)).clone());
}

}  // namespace argan
