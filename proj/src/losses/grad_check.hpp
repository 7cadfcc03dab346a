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
#ifndef ARGAN_LOSSES_GRAD_CHECK_HPP_
#define ARGAN_LOSSES_GRAD_CHECK_HPP_

#include <cstdint>
#include <functional>

#include <torch/types.h>

#include "networks/parameter_store.hpp"

namespace argan {

struct GradCheckResult {
  double max_relative_error = 0.0;
  int checked = 0;
};

// Central-difference check of autograd gradients on a random subsample of
// scalar parameters (at least min_samples, or all if fewer exist). Relative
// error uses max(|analytic|, |numeric|, 1e-8) as denominator. loss_fn must
// read the current values of `params`; run in double precision.
GradCheckResult GradCheck(const std::function<torch::Tensor()>& loss_fn, ParameterStore& params,
                          double epsilon, int min_samples = 32, std::uint64_t seed = 0);

}  // namespace argan

#endif  // ARGAN_LOSSES_GRAD_CHECK_HPP_
