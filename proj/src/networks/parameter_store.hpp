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
#ifndef ARGAN_NETWORKS_PARAMETER_STORE_HPP_
#define ARGAN_NETWORKS_PARAMETER_STORE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <torch/types.h>

namespace argan {

struct NamedTensor {
  std::string name;
  torch::Tensor value;
  bool trainable = true;  // false for buffers such as running statistics
};

// Flat, ordered store of named arrays. Order is registration order and is
// what checkpoints, initializers and fingerprints iterate over.
class ParameterStore {
 public:
  size_t Add(std::string name, torch::Tensor value, bool trainable = true);

  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::vector<NamedTensor>& entries() { return entries_; }
  size_t size() const { return entries_.size(); }

  const torch::Tensor& at(size_t index) const { return entries_[index].value; }
  const NamedTensor* Find(std::string_view name) const;

  std::vector<torch::Tensor> Trainable() const;
  std::int64_t ElementCount(bool trainable_only = true) const;

  // FNV-1a over names, shapes and raw bytes.
  std::uint64_t Fingerprint() const;

  void SetRequiresGrad(bool on);
  void ZeroGrad();
  void To(torch::Dtype dtype);
  ParameterStore Clone() const;
  // Copies values by name; shapes must match and every name must exist.
  void LoadFrom(const ParameterStore& other);

 private:
  std::vector<NamedTensor> entries_;
};

}  // namespace argan

#endif  // ARGAN_NETWORKS_PARAMETER_STORE_HPP_
