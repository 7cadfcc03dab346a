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
#include "training/optim.hpp"

#include <cmath>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

namespace {

void Restore(const Archive& archive, const std::string& name, torch::Tensor& dst) {
  const auto& src = archive.Tensor(name);
  Require(src.sizes() == dst.sizes(), "optimizer state shape mismatch for '" + name + "'", ErrorCode::kParse);
  dst.copy_(src);
}

}  // namespace

void AppendTrainable(ParamRefs& refs, const std::string& prefix, const ParameterStore& store) {
  for (const auto& e : store.entries()) {
    if (e.trainable) refs.emplace_back(prefix + e.name, e.value);
  }
}

Adam::Adam(ParamRefs params, AdamOptions options) : params_(std::move(params)), options_(options) {
  Require(options_.beta1 >= 0 && options_.beta1 < 1 && options_.beta2 >= 0 && options_.beta2 < 1,
          "Adam betas must lie in [0,1)");
  Require(options_.eps > 0, "Adam eps must be positive");
  for (const auto& [name, p] : params_) {
    m_.push_back(torch::zeros_like(p, torch::MemoryFormat::Contiguous).detach());
    v_.push_back(torch::zeros_like(p, torch::MemoryFormat::Contiguous).detach());
  }
}

void Adam::ZeroGrad() {
  for (auto& [name, p] : params_) {
    auto& g = p.mutable_grad();
    if (g.defined()) g.zero_();
  }
}

void Adam::Step(double lr) {
  torch::NoGradGuard no_grad;
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i].second;
    const auto& g = p.grad();
    if (!g.defined()) continue;
    m_[i].mul_(b1).add_(g, 1.0 - b1);
    v_[i].mul_(b2).addcmul_(g, g, 1.0 - b2);
    auto denom = (v_[i] / c2).sqrt_().add_(options_.eps);
    p.addcdiv_(m_[i], denom, -lr / c1);
  }
}

void Adam::Put(Archive& archive, const std::string& prefix) const {
  archive.PutText(prefix + "steps", FormatInt(steps_));
  for (size_t i = 0; i < params_.size(); ++i) {
    archive.PutTensor(prefix + "m/" + params_[i].first, m_[i]);
    archive.PutTensor(prefix + "v/" + params_[i].first, v_[i]);
  }
}

void Adam::Get(const Archive& archive, const std::string& prefix) {
  torch::NoGradGuard no_grad;
  steps_ = ParseInt(archive.Text(prefix + "steps"));
  for (size_t i = 0; i < params_.size(); ++i) {
    Restore(archive, prefix + "m/" + params_[i].first, m_[i]);
    Restore(archive, prefix + "v/" + params_[i].first, v_[i]);
  }
}

Sgd::Sgd(ParamRefs params, SgdOptions options) : params_(std::move(params)), options_(options) {
  Require(options_.momentum >= 0 && options_.momentum < 1, "SGD momentum must lie in [0,1)");
  Require(!options_.nesterov || options_.momentum > 0, "Nesterov SGD needs positive momentum");
  for (const auto& [name, p] : params_) {
    velocity_.push_back(torch::zeros_like(p, torch::MemoryFormat::Contiguous).detach());
  }
}

void Sgd::ZeroGrad() {
  for (auto& [name, p] : params_) {
    auto& g = p.mutable_grad();
    if (g.defined()) g.zero_();
  }
}

void Sgd::Step(double lr) {
  torch::NoGradGuard no_grad;
  for (size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i].second;
    if (!p.grad().defined()) continue;
    auto g = p.grad();
    if (options_.weight_decay != 0.0) g = g + p * options_.weight_decay;
    velocity_[i].mul_(options_.momentum).add_(g);
    if (options_.nesterov) {
      p.add_(g + velocity_[i] * options_.momentum, -lr);
    } else {
      p.add_(velocity_[i], -lr);
    }
  }
}

void Sgd::Put(Archive& archive, const std::string& prefix) const {
  for (size_t i = 0; i < params_.size(); ++i) archive.PutTensor(prefix + "v/" + params_[i].first, velocity_[i]);
}

void Sgd::Get(const Archive& archive, const std::string& prefix) {
  torch::NoGradGuard no_grad;
  for (size_t i = 0; i < params_.size(); ++i) Restore(archive, prefix + "v/" + params_[i].first, velocity_[i]);
}

}  // namespace argan
