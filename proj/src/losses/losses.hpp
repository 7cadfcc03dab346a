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
#ifndef ARGAN_LOSSES_LOSSES_HPP_
#define ARGAN_LOSSES_LOSSES_HPP_

#include <set>
#include <string_view>
#include <vector>

#include <torch/types.h>

namespace argan {

enum class AdversarialForm { kLeastSquares, kLogLikelihood };
enum class ArlDirection { kForward, kBackward, kBoth };

std::string_view ToString(ArlDirection d);
ArlDirection ParseArlDirection(std::string_view text);

struct LossWeights {
  double alpha = 10.0;
  double lam = 1.0;
  std::set<int> arl_layers = {0, 1, 2, 3};
  ArlDirection arl_direction = ArlDirection::kForward;

  void Validate() const;
};

// Generator-side components plus the two discriminator losses, which are
// reported but never folded into `total`.
struct LossReport {
  double g_adv_ab = 0.0;
  double g_adv_ba = 0.0;
  double d_a = 0.0;
  double d_b = 0.0;
  double cycle = 0.0;
  double arl = 0.0;
  double total = 0.0;
};

// Least squares: mean((real − 1)²) + mean(fake²). Not halved.
// Log form: −mean(log σ(real)) − mean(log(1 − σ(fake))).
torch::Tensor AdversarialLossD(const torch::Tensor& real_logits, const torch::Tensor& fake_logits,
                               AdversarialForm form = AdversarialForm::kLeastSquares);

// Least squares: mean((fake − 1)²). Log form: −mean(log σ(fake)).
torch::Tensor AdversarialLossG(const torch::Tensor& fake_logits,
                               AdversarialForm form = AdversarialForm::kLeastSquares);

// mean|a − a'| + mean|b − b'|.
torch::Tensor CycleLoss(const torch::Tensor& a, const torch::Tensor& a_reconstructed,
                        const torch::Tensor& b, const torch::Tensor& b_reconstructed);

// Σ over selected layers of (1/m_n)·‖A_x^n − A_y^n‖²_F, m_n the element count
// of the layer's map (batch included, so the term is a batch average).
torch::Tensor ActivationReconstructionLoss(const std::vector<torch::Tensor>& taps_x,
                                           const std::vector<torch::Tensor>& taps_y,
                                           const std::set<int>& layers);

// g_adv_AB + g_adv_BA + α·cycle + λ·arl.
template <typename T>
T ComposeTotal(const T& g_adv_ab, const T& g_adv_ba, const T& cycle, const T& arl, const LossWeights& w) {
  return g_adv_ab + g_adv_ba + cycle * w.alpha + arl * w.lam;
}

double TotalObjective(const LossReport& parts, const LossWeights& weights);

}  // namespace argan

#endif  // ARGAN_LOSSES_LOSSES_HPP_
