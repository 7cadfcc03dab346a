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
#ifndef ARGAN_TRAINING_OPTIM_HPP_
#define ARGAN_TRAINING_OPTIM_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <torch/types.h>

#include "networks/archive.hpp"
#include "networks/parameter_store.hpp"

namespace argan {

// Named handles to the tensors an optimizer updates. Handles share storage
// with the owning store.
using ParamRefs = std::vector<std::pair<std::string, torch::Tensor>>;

void AppendTrainable(ParamRefs& refs, const std::string& prefix, const ParameterStore& store);

struct AdamOptions {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Moments are explicit tensors so they can be
// checkpointed and restored bit-exactly.
class Adam {
 public:
  Adam(ParamRefs params, AdamOptions options);

  void ZeroGrad();
  void Step(double lr);
  std::int64_t steps() const { return steps_; }

  void Put(Archive& archive, const std::string& prefix) const;
  void Get(const Archive& archive, const std::string& prefix);

 private:
  ParamRefs params_;
  AdamOptions options_;
  std::vector<torch::Tensor> m_;
  std::vector<torch::Tensor> v_;
  std::int64_t steps_ = 0;
};

struct SgdOptions {
  double momentum = 0.9;
  bool nesterov = true;
  double weight_decay = 0.0;
};

// v ← μv + g;  p ← p − lr·(g + μv) (Nesterov) or p ← p − lr·v.
class Sgd {
 public:
  Sgd(ParamRefs params, SgdOptions options);

  void ZeroGrad();
  void Step(double lr);

  void Put(Archive& archive, const std::string& prefix) const;
  void Get(const Archive& archive, const std::string& prefix);

 private:
  ParamRefs params_;
  SgdOptions options_;
  std::vector<torch::Tensor> velocity_;
};

}  // namespace argan

#endif  // ARGAN_TRAINING_OPTIM_HPP_
