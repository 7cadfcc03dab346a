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
#include "losses/losses.hpp"

#include <cmath>

#include "common/error.hpp"

namespace argan {

std::string_view ToString(ArlDirection d) {
  switch (d) {
    case ArlDirection::kForward: return "forward";
    case ArlDirection::kBackward: return "backward";
    case ArlDirection::kBoth: return "both";
  }
  return "forward";
}

ArlDirection ParseArlDirection(std::string_view text) {
  if (text == "forward") return ArlDirection::kForward;
  if (text == "backward") return ArlDirection::kBackward;
  if (text == "both") return ArlDirection::kBoth;
  Fail(ErrorCode::kInvalidArgument, "unknown ARL direction '" + std::string(text) + "'");
}

void LossWeights::Validate() const {
  Require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and non-negative");
  Require(std::isfinite(lam) && lam >= 0.0, "lam must be finite and non-negative");
  Require(lam == 0.0 || !arl_layers.empty(), "arl_layers must be non-empty when lam > 0");
  for (int l : arl_layers) Require(l >= 0, "negative ARL layer index");
}

torch::Tensor AdversarialLossD(const torch::Tensor& real_logits, const torch::Tensor& fake_logits,
                               AdversarialForm form) {
  Require(real_logits.numel() > 0 && fake_logits.numel() > 0, "adversarial loss on empty logits");
  if (form == AdversarialForm::kLogLikelihood) {
    return -torch::log_sigmoid(real_logits).mean() - torch::log_sigmoid(-fake_logits).mean();
  }
  return (real_logits - 1.0).square().mean() + fake_logits.square().mean();
}

torch::Tensor AdversarialLossG(const torch::Tensor& fake_logits, AdversarialForm form) {
  Require(fake_logits.numel() > 0, "adversarial loss on empty logits");
  if (form == AdversarialForm::kLogLikelihood) return -torch::log_sigmoid(fake_logits).mean();
  return (fake_logits - 1.0).square().mean();
}

torch::Tensor CycleLoss(const torch::Tensor& a, const torch::Tensor& a_reconstructed, const torch::Tensor& b,
                        const torch::Tensor& b_reconstructed) {
  Require(a.sizes() == a_reconstructed.sizes(), "cycle loss: shape mismatch between a and its reconstruction");
  Require(b.sizes() == b_reconstructed.sizes(), "cycle loss: shape mismatch between b and its reconstruction");
  return (a - a_reconstructed).abs().mean() + (b - b_reconstructed).abs().mean();
}

torch::Tensor ActivationReconstructionLoss(const std::vector<torch::Tensor>& taps_x,
                                           const std::vector<torch::Tensor>& taps_y,
                                           const std::set<int>& layers) {
  Require(!layers.empty(), "ARL needs at least one layer");
  torch::Tensor total;
  for (int l : layers) {
    Require(l >= 0 && static_cast<size_t>(l) < taps_x.size() && static_cast<size_t>(l) < taps_y.size(),
            "ARL layer index " + std::to_string(l) + " out of range");
    const auto& x = taps_x[static_cast<size_t>(l)];
    const auto& y = taps_y[static_cast<size_t>(l)];
    Require(x.sizes() == y.sizes(), "ARL shape mismatch at layer " + std::to_string(l));
    auto term = (x - y).square().sum() / static_cast<double>(x.numel());
    total = total.defined() ? total + term : term;
  }
  return total;
}

double TotalObjective(const LossReport& p, const LossWeights& w) {
  return ComposeTotal(p.g_adv_ab, p.g_adv_ba, p.cycle, p.arl, w);
}

}  // namespace argan
