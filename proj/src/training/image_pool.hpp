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
#ifndef ARGAN_TRAINING_IMAGE_POOL_HPP_
#define ARGAN_TRAINING_IMAGE_POOL_HPP_

#include <string>
#include <vector>

#include <torch/types.h>

#include "common/rng.hpp"
#include "networks/archive.hpp"

namespace argan {

// History of generated images fed to a discriminator. While filling, every
// push is stored and returned as is. Once full, a push returns the input
// with probability 1/2 and otherwise swaps it with a uniformly chosen stored
// image, returning the evicted one.
class ImagePool {
 public:
  explicit ImagePool(int capacity);

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(images_.size()); }

  // Single image (C,H,W). `swapped` is set when a stored image came back.
  torch::Tensor PushSample(const torch::Tensor& image, Rng& rng, bool* swapped = nullptr);
  // Batch (N,C,H,W), image by image.
  torch::Tensor PushSampleBatch(const torch::Tensor& batch, Rng& rng);

  void Put(Archive& archive, const std::string& prefix) const;
  void Get(const Archive& archive, const std::string& prefix);

 private:
  int capacity_;
  std::vector<torch::Tensor> images_;
};

}  // namespace argan

#endif  // ARGAN_TRAINING_IMAGE_POOL_HPP_
