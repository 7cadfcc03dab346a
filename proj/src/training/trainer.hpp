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
#ifndef ARGAN_TRAINING_TRAINER_HPP_
#define ARGAN_TRAINING_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <torch/types.h>

#include "common/config.hpp"
#include "common/rng.hpp"
#include "core_data/manifest.hpp"
#include "losses/losses.hpp"
#include "networks/network.hpp"
#include "training/image_pool.hpp"
#include "training/optim.hpp"

namespace argan {

struct TrainConfig {
  double alpha = 10.0;
  double lam = 1.0;
  int epochs = 200;
  int decay_start_epoch = 100;
  int batch_size = 1;
  double base_lr = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int pool_size = 50;
  std::uint64_t seed = 0;
  std::set<int> arl_layers = {0, 1, 2, 3};
  ArlDirection arl_direction = ArlDirection::kForward;
  AdversarialForm adversarial = AdversarialForm::kLeastSquares;
  // Preset names or explicit token lists.
  std::string generator = "resnet9";
  std::string discriminator = "patch70";
  std::string feature_extractor = "default";
  // Optional network archive with pretrained feature-extractor weights;
  // empty means seeded random weights. Either way the extractor is frozen.
  std::string feature_weights;
  int image_side = 256;
  double init_std = 0.02;
  int checkpoint_every = 10;

  void Validate() const;
  LossWeights Weights() const;

  // Applies one setting; returns false for an unknown key.
  bool Set(const std::string& key, const std::string& value);
  KeyValues ToKeyValues() const;
  std::string ToText() const;
  static TrainConfig FromText(std::string_view text);
};

// Flat at base_lr before decay_start_epoch, then linear down to 0 at epochs.
double LrAt(int epoch, const TrainConfig& config);

struct StepRecord {
  std::int64_t step = 0;
  int epoch = 0;
  LossReport losses;
};

inline constexpr std::string_view kLossHistoryHeader = "step,epoch,g_adv_AB,g_adv_BA,d_A,d_B,cycle,arl,total";

std::string LossHistoryCsv(const std::vector<StepRecord>& history);
std::vector<StepRecord> ParseLossHistoryCsv(std::string_view text);

// Everything a run needs to continue bit-exactly: networks, optimizer
// moments, fake pools, the sampling stream and the loss history.
class TrainState {
 public:
  explicit TrainState(const TrainConfig& config);
  TrainState(const TrainState&) = delete;
  TrainState& operator=(const TrainState&) = delete;

  TrainConfig config;
  int epoch = 0;  // completed epochs
  std::int64_t step = 0;
  Network g_ab;
  Network g_ba;
  Network d_a;
  Network d_b;
  Network feature;  // frozen
  Adam opt_g;
  Adam opt_d_a;
  Adam opt_d_b;
  ImagePool pool_a;  // generated A-domain images
  ImagePool pool_b;
  Rng rng;
  std::vector<StepRecord> history;

 private:
  friend std::unique_ptr<TrainState> LoadCheckpoint(const std::filesystem::path& path);
  TrainState(const TrainConfig& config, Network feature_net);
};

void SaveCheckpoint(const TrainState& state, const std::filesystem::path& path);
std::unique_ptr<TrainState> LoadCheckpoint(const std::filesystem::path& path);

// Generator half of a step: one Adam update of G_AB and G_BA on
// g_adv_AB + g_adv_BA + α·cycle + λ·arl. Fills the generator-side fields
// of `report` (and total) and returns the detached fakes (fake_a, fake_b).
std::pair<torch::Tensor, torch::Tensor> GeneratorUpdate(TrainState& state, const torch::Tensor& real_a,
                                                        const torch::Tensor& real_b, double lr, LossReport& report);
// One Adam update of D_A (domain A) or D_B on current reals vs pooled fakes.
double DiscriminatorUpdate(TrainState& state, Domain domain, const torch::Tensor& real,
                           const torch::Tensor& fake, double lr);

// G, then D_A, then D_B. Appends to the history and advances `step`.
LossReport TrainStep(TrainState& state, const torch::Tensor& real_a, const torch::Tensor& real_b);

struct TrainOptions {
  std::filesystem::path out_dir;  // empty: no files written
  int stop_after_epoch = -1;      // checkpoint and return early at this epoch
  std::function<void(const TrainState&)> on_epoch_end;
};

// Trains on the train-split records of both manifests until config.epochs.
// An epoch covers the larger domain once, wrapping around the smaller one;
// both orders are reshuffled every epoch. Writes checkpoint_epochNNNN.argan
// every checkpoint_every epochs and at the end, plus loss_history.csv and
// train_config.txt.
std::unique_ptr<TrainState> Train(const DatasetManifest& domain_a, const DatasetManifest& domain_b,
                                  const TrainConfig& config, const TrainOptions& options);
// Continues a checkpointed run to its configured epoch count.
void ContinueTraining(TrainState& state, const DatasetManifest& domain_a, const DatasetManifest& domain_b,
                      const TrainOptions& options);

std::string CheckpointName(int epoch);

struct TranslateOptions {
  std::string target_label;
  Domain target_domain = Domain::kB;
  int resize_to = 256;
  int batch_size = 4;
};

// Maps every record through the generator and writes PNGs into out_dir.
// Returned records are synthetic, train split, labelled with the target.
std::vector<ImageRecord> Translate(const Network& generator, const DatasetManifest& manifest,
                                   const std::filesystem::path& out_dir, const TranslateOptions& options);

}  // namespace argan

#endif  // ARGAN_TRAINING_TRAINER_HPP_
