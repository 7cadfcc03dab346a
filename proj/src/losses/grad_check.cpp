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
#include "losses/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace argan {

namespace {

double Evaluate(const std::function<torch::Tensor()>& loss_fn) {
  const double v = loss_fn().item<double>();
  if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "grad check: non-finite loss encountered");
  return v;
}

}  // namespace

GradCheckResult GradCheck(const std::function<torch::Tensor()>& loss_fn, ParameterStore& params,
                          double epsilon, int min_samples, std::uint64_t seed) {
  Require(epsilon > 0.0, "grad check epsilon must be positive");
  params.SetRequiresGrad(true);
  params.ZeroGrad();
  auto loss = loss_fn();
  Require(std::isfinite(loss.item<double>()), "grad check: non-finite loss encountered", ErrorCode::kNumeric);
  loss.backward();

  // (entry, flat offset) pairs over trainable entries.
  std::vector<std::pair<size_t, int64_t>> all;
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params.entries()[i].trainable) continue;
    for (int64_t j = 0; j < params.at(i).numel(); ++j) all.emplace_back(i, j);
  }
  Require(!all.empty(), "grad check: no trainable parameters");
  Rng rng = DeriveRng({seed, 0x6c});
  std::shuffle(all.begin(), all.end(), rng);
  const size_t n = std::min(all.size(), static_cast<size_t>(std::max(min_samples, 1)));

  GradCheckResult result;
  torch::NoGradGuard no_grad;
  for (size_t k = 0; k < n; ++k) {
    auto [i, j] = all[k];
    auto flat = params.at(i).view({-1});
    const auto& grad = params.at(i).grad();
    const double analytic = grad.defined() ? grad.view({-1})[j].item<double>() : 0.0;
    const double original = flat[j].item<double>();
    flat[j].fill_(original + epsilon);
    const double plus = Evaluate(loss_fn);
    flat[j].fill_(original - epsilon);
    const double minus = Evaluate(loss_fn);
    flat[j].fill_(original);
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(analytic - numeric) / denom);
    ++result.checked;
  }
  return result;
}

}  // namespace argan
