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
#include "networks/parameter_store.hpp"

#include "common/error.hpp"

namespace argan {

size_t ParameterStore::Add(std::string name, torch::Tensor value, bool trainable) {
  Require(Find(name) == nullptr, "duplicate parameter name '" + name + "'", ErrorCode::kInternal);
  entries_.push_back({std::move(name), std::move(value), trainable});
  return entries_.size() - 1;
}

const NamedTensor* ParameterStore::Find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<torch::Tensor> ParameterStore::Trainable() const {
  std::vector<torch::Tensor> out;
  for (const auto& e : entries_) {
    if (e.trainable) out.push_back(e.value);
  }
  return out;
}

std::int64_t ParameterStore::ElementCount(bool trainable_only) const {
  std::int64_t n = 0;
  for (const auto& e : entries_) {
    if (e.trainable || !trainable_only) n += e.value.numel();
  }
  return n;
}

std::uint64_t ParameterStore::Fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& e : entries_) {
    mix(e.name.data(), e.name.size());
    auto t = e.value.detach().contiguous();
    for (auto d : t.sizes()) mix(&d, sizeof(d));
    mix(t.data_ptr(), static_cast<size_t>(t.numel()) * t.element_size());
  }
  return h;
}

void ParameterStore::SetRequiresGrad(bool on) {
  for (auto& e : entries_) {
    if (e.trainable) e.value.set_requires_grad(on);
  }
}

void ParameterStore::ZeroGrad() {
  for (auto& e : entries_) {
    auto& g = e.value.mutable_grad();
    if (g.defined()) g.zero_();
  }
}

void ParameterStore::To(torch::Dtype dtype) {
  for (auto& e : entries_) {
    if (!e.value.is_floating_point()) continue;
    const bool grad = e.value.requires_grad();
    e.value = e.value.detach().to(dtype).contiguous();
    if (grad) e.value.set_requires_grad(true);
  }
}

ParameterStore ParameterStore::Clone() const {
  ParameterStore out;
  for (const auto& e : entries_) {
    auto v = e.value.detach().clone();
    if (e.value.requires_grad()) v.set_requires_grad(true);
    out.entries_.push_back({e.name, v, e.trainable});
  }
  return out;
}

void ParameterStore::LoadFrom(const ParameterStore& other) {
  torch::NoGradGuard no_grad;
  for (auto& e : entries_) {
    const NamedTensor* src = other.Find(e.name);
    Require(src != nullptr, "missing parameter '" + e.name + "'", ErrorCode::kParse);
    Require(src->value.sizes() == e.value.sizes(), "shape mismatch for parameter '" + e.name + "'",
            ErrorCode::kParse);
    e.value.copy_(src->value);
  }
}

}  // namespace argan
