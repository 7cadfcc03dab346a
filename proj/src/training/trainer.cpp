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
#include "training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "core_data/image_io.hpp"
#include "networks/archive.hpp"

namespace argan {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStream = 0xA46A;
constexpr std::uint64_t kSampleStream = 0x7A11;

std::uint64_t SubSeed(std::uint64_t seed, std::uint64_t role) { return DeriveRng({seed, kInitStream, role})(); }

std::string_view ToString(AdversarialForm f) {
  return f == AdversarialForm::kLeastSquares ? "least_squares" : "log_likelihood";
}

AdversarialForm ParseAdversarialForm(std::string_view text) {
  if (text == "least_squares") return AdversarialForm::kLeastSquares;
  if (text == "log_likelihood") return AdversarialForm::kLogLikelihood;
  Fail(ErrorCode::kInvalidArgument, "unknown adversarial form '" + std::string(text) + "'");
}

int ToInt(const std::string& v) { return static_cast<int>(ParseInt(v)); }

Network MakeFeatureExtractor(const TrainConfig& c) {
  if (!c.feature_weights.empty()) {
    Network net = LoadNetwork(c.feature_weights);
    Require(net.kind() == NetworkKind::kFeatureExtractor,
            "feature_weights must hold a feature-extractor network", ErrorCode::kParse);
    return net;
  }
  Network net = BuildFeatureExtractor(ResolveFeatureExtractorSpec(c.feature_extractor));
  InitWeights(net, 0.0, c.init_std, SubSeed(c.seed, 5));
  return net;
}

Network Initialized(Network net, double std, std::uint64_t seed) {
  InitWeights(net, 0.0, std, seed);
  return net;
}

ParamRefs GeneratorRefs(const Network& g_ab, const Network& g_ba) {
  ParamRefs refs;
  AppendTrainable(refs, "G_AB/", g_ab.params());
  AppendTrainable(refs, "G_BA/", g_ba.params());
  return refs;
}

ParamRefs Refs(const std::string& prefix, const Network& net) {
  ParamRefs refs;
  AppendTrainable(refs, prefix, net.params());
  return refs;
}

void CheckFinite(const torch::Tensor& t, std::string_view term, std::int64_t step) {
  if (!std::isfinite(t.item<double>())) {
    Fail(ErrorCode::kNumeric, "non-finite " + std::string(term) + " loss at step " + FormatInt(step));
  }
}

// Decoded images, kept as 8-bit RGB so large sets stay affordable.
class ImageCache {
 public:
  ImageCache(const DatasetManifest& manifest, int side) {
    for (const auto& r : manifest.records) {
      if (r.split == Split::kTrain) images_.push_back(ResizeBicubic(ReadRgb(r.path), side));
    }
  }
  size_t size() const { return images_.size(); }
  torch::Tensor Batch(const std::vector<size_t>& idx) const {
    std::vector<torch::Tensor> out;
    for (size_t i : idx) out.push_back(ImageToTensor(images_[i]));
    return torch::stack(out);
  }

 private:
  std::vector<cv::Mat> images_;
};

void WriteSidecars(const TrainState& s, const fs::path& out_dir) {
  WriteTextFile(out_dir / "train_config.txt", s.config.ToText());
  WriteTextFile(out_dir / "loss_history.csv", LossHistoryCsv(s.history));
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainConfig

void TrainConfig::Validate() const {
  Require(epochs >= 0, "epochs must be non-negative");
  Require(decay_start_epoch >= 0 && decay_start_epoch <= epochs, "decay_start_epoch must lie in [0, epochs]");
  Require(batch_size >= 1, "batch_size must be at least 1");
  Require(std::isfinite(base_lr) && base_lr > 0, "base_lr must be positive");
  Require(pool_size >= 0, "pool_size must be non-negative");
  Require(image_side >= 16 && image_side % 4 == 0, "image_side must be a multiple of 4, at least 16");
  Require(std::isfinite(init_std) && init_std > 0, "init_std must be positive");
  Require(checkpoint_every >= 1, "checkpoint_every must be at least 1");
  Weights().Validate();
}

LossWeights TrainConfig::Weights() const {
  LossWeights w;
  w.alpha = alpha;
  w.lam = lam;
  w.arl_layers = arl_layers;
  w.arl_direction = arl_direction;
  return w;
}

bool TrainConfig::Set(const std::string& key, const std::string& v) {
  if (key == "alpha") alpha = ParseReal(v);
  else if (key == "lam") lam = ParseReal(v);
  else if (key == "epochs") epochs = ToInt(v);
  else if (key == "decay_start_epoch") decay_start_epoch = ToInt(v);
  else if (key == "batch_size") batch_size = ToInt(v);
  else if (key == "base_lr") base_lr = ParseReal(v);
  else if (key == "adam_beta1") adam_beta1 = ParseReal(v);
  else if (key == "adam_beta2") adam_beta2 = ParseReal(v);
  else if (key == "adam_eps") adam_eps = ParseReal(v);
  else if (key == "pool_size") pool_size = ToInt(v);
  else if (key == "seed") seed = static_cast<std::uint64_t>(ParseInt(v));
  else if (key == "arl_layers") arl_layers = ParseIntSet(v);
  else if (key == "arl_direction") arl_direction = ParseArlDirection(v);
  else if (key == "adversarial") adversarial = ParseAdversarialForm(v);
  else if (key == "generator") generator = v;
  else if (key == "discriminator") discriminator = v;
  else if (key == "feature_extractor") feature_extractor = v;
  else if (key == "feature_weights") feature_weights = v;
  else if (key == "image_side") image_side = ToInt(v);
  else if (key == "init_std") init_std = ParseReal(v);
  else if (key == "checkpoint_every") checkpoint_every = ToInt(v);
  else return false;
  return true;
}

KeyValues TrainConfig::ToKeyValues() const {
  return {
      {"alpha", FormatReal(alpha)},
      {"lam", FormatReal(lam)},
      {"epochs", FormatInt(epochs)},
      {"decay_start_epoch", FormatInt(decay_start_epoch)},
      {"batch_size", FormatInt(batch_size)},
      {"base_lr", FormatReal(base_lr)},
      {"adam_beta1", FormatReal(adam_beta1)},
      {"adam_beta2", FormatReal(adam_beta2)},
      {"adam_eps", FormatReal(adam_eps)},
      {"pool_size", FormatInt(pool_size)},
      {"seed", FormatInt(static_cast<std::int64_t>(seed))},
      {"arl_layers", FormatIntSet(arl_layers)},
      {"arl_direction", std::string(ToString(arl_direction))},
      {"adversarial", std::string(ToString(adversarial))},
      {"generator", generator},
      {"discriminator", discriminator},
      {"feature_extractor", feature_extractor},
      {"feature_weights", feature_weights},
      {"image_side", FormatInt(image_side)},
      {"init_std", FormatReal(init_std)},
      {"checkpoint_every", FormatInt(checkpoint_every)},
  };
}

std::string TrainConfig::ToText() const { return FormatKeyValues(ToKeyValues()); }

TrainConfig TrainConfig::FromText(std::string_view text) {
  TrainConfig c;
  for (const auto& [k, v] : ParseKeyValues(text)) {
    if (!c.Set(k, v)) Fail(ErrorCode::kParse, "unknown training setting '" + k + "'");
  }
  return c;
}

double LrAt(int epoch, const TrainConfig& c) {
  Require(epoch >= 0 && epoch <= c.epochs, "epoch " + FormatInt(epoch) + " outside [0, epochs]");
  if (epoch < c.decay_start_epoch) return c.base_lr;
  const int span = c.epochs - c.decay_start_epoch;
  if (span == 0) return 0.0;
  return c.base_lr * (1.0 - static_cast<double>(epoch - c.decay_start_epoch) / static_cast<double>(span));
}

std::string LossHistoryCsv(const std::vector<StepRecord>& history) {
  CsvWriter w(SplitCsvRow(kLossHistoryHeader));
  for (const auto& r : history) {
    const auto& l = r.losses;
    w.Add({FormatInt(r.step), FormatInt(r.epoch), FormatReal(l.g_adv_ab), FormatReal(l.g_adv_ba), FormatReal(l.d_a),
           FormatReal(l.d_b), FormatReal(l.cycle), FormatReal(l.arl), FormatReal(l.total)});
  }
  return w.ToString();
}

std::vector<StepRecord> ParseLossHistoryCsv(std::string_view text) {
  std::vector<StepRecord> out;
  size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (header) {
      Require(line == kLossHistoryHeader, "unexpected loss history header", ErrorCode::kParse);
      header = false;
      continue;
    }
    const auto f = SplitCsvRow(line);
    Require(f.size() == 9, "malformed loss history row", ErrorCode::kParse);
    StepRecord r;
    r.step = ParseInt(f[0]);
    r.epoch = static_cast<int>(ParseInt(f[1]));
    r.losses = {ParseReal(f[2]), ParseReal(f[3]), ParseReal(f[4]), ParseReal(f[5]),
                ParseReal(f[6]), ParseReal(f[7]), ParseReal(f[8])};
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// State and checkpoints

TrainState::TrainState(const TrainConfig& c) : TrainState(c, MakeFeatureExtractor(c)) {}

TrainState::TrainState(const TrainConfig& c, Network feature_net)
    : config((c.Validate(), c)),
      g_ab(Initialized(BuildGenerator(ResolveGeneratorSpec(c.generator)), c.init_std, SubSeed(c.seed, 1))),
      g_ba(Initialized(BuildGenerator(ResolveGeneratorSpec(c.generator)), c.init_std, SubSeed(c.seed, 2))),
      d_a(Initialized(BuildDiscriminator(ResolveDiscriminatorSpec(c.discriminator)), c.init_std, SubSeed(c.seed, 3))),
      d_b(Initialized(BuildDiscriminator(ResolveDiscriminatorSpec(c.discriminator)), c.init_std, SubSeed(c.seed, 4))),
      feature(std::move(feature_net)),
      opt_g(GeneratorRefs(g_ab, g_ba), {c.adam_beta1, c.adam_beta2, c.adam_eps}),
      opt_d_a(Refs("D_A/", d_a), {c.adam_beta1, c.adam_beta2, c.adam_eps}),
      opt_d_b(Refs("D_B/", d_b), {c.adam_beta1, c.adam_beta2, c.adam_eps}),
      pool_a(c.pool_size),
      pool_b(c.pool_size),
      rng(DeriveRng({c.seed, kSampleStream})) {
  if (c.lam > 0) {
    Require(*c.arl_layers.rbegin() < feature.TapCount(),
            "arl_layers index exceeds the feature extractor's " + FormatInt(feature.TapCount()) + " taps");
  }
  feature.params().SetRequiresGrad(false);
  for (Network* n : {&g_ab, &g_ba, &d_a, &d_b}) n->params().SetRequiresGrad(true);
}

void SaveCheckpoint(const TrainState& s, const fs::path& path) {
  Archive a;
  a.PutText("format", "argan-checkpoint");
  a.PutText("config", s.config.ToText());
  a.PutText("epoch", FormatInt(s.epoch));
  a.PutText("step", FormatInt(s.step));
  a.PutText("rng", SerializeRng(s.rng));
  a.PutText("history", LossHistoryCsv(s.history));
  PutNetwork(a, "G_AB/", s.g_ab);
  PutNetwork(a, "G_BA/", s.g_ba);
  PutNetwork(a, "D_A/", s.d_a);
  PutNetwork(a, "D_B/", s.d_b);
  PutNetwork(a, "F/", s.feature);
  s.opt_g.Put(a, "opt_G/");
  s.opt_d_a.Put(a, "opt_D_A/");
  s.opt_d_b.Put(a, "opt_D_B/");
  s.pool_a.Put(a, "pool_A/");
  s.pool_b.Put(a, "pool_B/");
  a.Save(path);
}

std::unique_ptr<TrainState> LoadCheckpoint(const fs::path& path) {
  const Archive a = Archive::Load(path);
  Require(a.HasText("format") && a.Text("format") == "argan-checkpoint", path.string() + " is not a training checkpoint",
          ErrorCode::kParse);
  const TrainConfig config = TrainConfig::FromText(a.Text("config"));
  std::unique_ptr<TrainState> s(new TrainState(config, GetNetwork(a, "F/")));
  s->epoch = static_cast<int>(ParseInt(a.Text("epoch")));
  s->step = ParseInt(a.Text("step"));
  s->rng = DeserializeRng(a.Text("rng"));
  s->history = ParseLossHistoryCsv(a.Text("history"));
  GetParameters(a, "G_AB/", s->g_ab.params());
  GetParameters(a, "G_BA/", s->g_ba.params());
  GetParameters(a, "D_A/", s->d_a.params());
  GetParameters(a, "D_B/", s->d_b.params());
  s->opt_g.Get(a, "opt_G/");
  s->opt_d_a.Get(a, "opt_D_A/");
  s->opt_d_b.Get(a, "opt_D_B/");
  s->pool_a.Get(a, "pool_A/");
  s->pool_b.Get(a, "pool_B/");
  return s;
}

// ---------------------------------------------------------------------------
// Steps

std::pair<torch::Tensor, torch::Tensor> GeneratorUpdate(TrainState& s, const torch::Tensor& a, const torch::Tensor& b,
                                                        double lr, LossReport& report) {
  const auto& c = s.config;
  const auto w = c.Weights();
  s.d_a.params().SetRequiresGrad(false);
  s.d_b.params().SetRequiresGrad(false);
  s.opt_g.ZeroGrad();

  auto fake_b = s.g_ab.Forward(a);
  auto rec_a = s.g_ba.Forward(fake_b);
  auto fake_a = s.g_ba.Forward(b);
  auto rec_b = s.g_ab.Forward(fake_a);

  auto g_adv_ab = AdversarialLossG(s.d_b.Forward(fake_b), c.adversarial);
  auto g_adv_ba = AdversarialLossG(s.d_a.Forward(fake_a), c.adversarial);
  auto cycle = CycleLoss(a, rec_a, b, rec_b);
  auto arl = torch::zeros({}, a.options());
  if (c.lam > 0) {
    auto term = [&](const torch::Tensor& real, const torch::Tensor& fake) {
      std::vector<torch::Tensor> taps_real;
      {
        torch::NoGradGuard no_grad;
        taps_real = s.feature.ForwardTaps(real);
      }
      return ActivationReconstructionLoss(taps_real, s.feature.ForwardTaps(fake), c.arl_layers);
    };
    if (c.arl_direction != ArlDirection::kBackward) arl = arl + term(a, fake_b);
    if (c.arl_direction != ArlDirection::kForward) arl = arl + term(b, fake_a);
  }
  CheckFinite(g_adv_ab, "g_adv_AB", s.step);
  CheckFinite(g_adv_ba, "g_adv_BA", s.step);
  CheckFinite(cycle, "cycle", s.step);
  CheckFinite(arl, "arl", s.step);

  auto total = ComposeTotal(g_adv_ab, g_adv_ba, cycle, arl, w);
  total.backward();
  s.opt_g.Step(lr);

  report.g_adv_ab = g_adv_ab.item<double>();
  report.g_adv_ba = g_adv_ba.item<double>();
  report.cycle = cycle.item<double>();
  report.arl = arl.item<double>();
  report.total = TotalObjective(report, w);

  s.d_a.params().SetRequiresGrad(true);
  s.d_b.params().SetRequiresGrad(true);
  return {fake_a.detach(), fake_b.detach()};
}

double DiscriminatorUpdate(TrainState& s, Domain domain, const torch::Tensor& real, const torch::Tensor& fake,
                           double lr) {
  const bool is_a = domain == Domain::kA;
  Network& d = is_a ? s.d_a : s.d_b;
  Adam& opt = is_a ? s.opt_d_a : s.opt_d_b;
  ImagePool& pool = is_a ? s.pool_a : s.pool_b;
  const auto pooled = pool.PushSampleBatch(fake.detach(), s.rng);
  opt.ZeroGrad();
  auto loss = AdversarialLossD(d.Forward(real), d.Forward(pooled), s.config.adversarial);
  CheckFinite(loss, is_a ? "d_A" : "d_B", s.step);
  loss.backward();
  opt.Step(lr);
  return loss.item<double>();
}

namespace {

LossReport StepAt(TrainState& s, const torch::Tensor& a, const torch::Tensor& b, int epoch) {
  Require(a.size(0) == b.size(0), "domain batches must have equal size");
  const double lr = LrAt(epoch, s.config);
  LossReport report;
  auto [fake_a, fake_b] = GeneratorUpdate(s, a, b, lr, report);
  report.d_a = DiscriminatorUpdate(s, Domain::kA, a, fake_a, lr);
  report.d_b = DiscriminatorUpdate(s, Domain::kB, b, fake_b, lr);
  s.history.push_back({s.step, epoch, report});
  ++s.step;
  return report;
}

}  // namespace

LossReport TrainStep(TrainState& s, const torch::Tensor& a, const torch::Tensor& b) {
  return StepAt(s, a, b, std::min(s.epoch, s.config.epochs));
}

// ---------------------------------------------------------------------------
// Loop

std::string CheckpointName(int epoch) {
  std::string n = FormatInt(epoch);
  if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
  return "checkpoint_epoch" + n + ".argan";
}

void ContinueTraining(TrainState& s, const DatasetManifest& domain_a, const DatasetManifest& domain_b,
                      const TrainOptions& options) {
  const auto& c = s.config;
  const ImageCache cache_a(domain_a, c.image_side);
  const ImageCache cache_b(domain_b, c.image_side);
  Require(cache_a.size() > 0, "domain A has no train-split records");
  Require(cache_b.size() > 0, "domain B has no train-split records");
  if (!options.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    Require(!ec && fs::is_directory(options.out_dir), "cannot create output directory " + options.out_dir.string(),
            ErrorCode::kIo);
  }
  const size_t n = std::max(cache_a.size(), cache_b.size());
  const size_t bs = static_cast<size_t>(c.batch_size);

  auto checkpoint = [&] {
    if (options.out_dir.empty()) return;
    SaveCheckpoint(s, options.out_dir / CheckpointName(s.epoch));
    WriteSidecars(s, options.out_dir);
  };
  if (s.epoch >= c.epochs) {
    checkpoint();
    return;
  }
  while (s.epoch < c.epochs) {
    std::vector<size_t> order_a(cache_a.size()), order_b(cache_b.size());
    std::iota(order_a.begin(), order_a.end(), size_t{0});
    std::iota(order_b.begin(), order_b.end(), size_t{0});
    std::shuffle(order_a.begin(), order_a.end(), s.rng);
    std::shuffle(order_b.begin(), order_b.end(), s.rng);
    for (size_t start = 0; start < n; start += bs) {
      std::vector<size_t> ia, ib;
      for (size_t j = start; j < std::min(n, start + bs); ++j) {
        ia.push_back(order_a[j % order_a.size()]);
        ib.push_back(order_b[j % order_b.size()]);
      }
      StepAt(s, cache_a.Batch(ia), cache_b.Batch(ib), s.epoch);
    }
    ++s.epoch;
    if (options.on_epoch_end) options.on_epoch_end(s);
    const bool stop = s.epoch == options.stop_after_epoch;
    if (s.epoch % c.checkpoint_every == 0 || s.epoch == c.epochs || stop) checkpoint();
    if (stop) break;
  }
}

std::unique_ptr<TrainState> Train(const DatasetManifest& domain_a, const DatasetManifest& domain_b,
                                  const TrainConfig& config, const TrainOptions& options) {
  auto s = std::make_unique<TrainState>(config);
  ContinueTraining(*s, domain_a, domain_b, options);
  return s;
}

// ---------------------------------------------------------------------------
// Inference

std::vector<ImageRecord> Translate(const Network& generator, const DatasetManifest& manifest, const fs::path& out_dir,
                                   const TranslateOptions& options) {
  Require(generator.kind() == NetworkKind::kGenerator, "translate needs a generator network");
  Require(options.resize_to >= 16 && options.resize_to % 4 == 0, "resize_to must be a multiple of 4, at least 16");
  Require(options.batch_size >= 1, "batch_size must be at least 1");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Require(!ec && fs::is_directory(out_dir), "cannot create output directory " + out_dir.string(), ErrorCode::kIo);

  torch::NoGradGuard no_grad;
  const auto dtype = generator.params().entries().front().value.scalar_type();
  std::vector<ImageRecord> out;
  const auto& recs = manifest.records;
  for (size_t start = 0; start < recs.size(); start += static_cast<size_t>(options.batch_size)) {
    const size_t end = std::min(recs.size(), start + static_cast<size_t>(options.batch_size));
    std::vector<ImageRecord> chunk(recs.begin() + static_cast<std::ptrdiff_t>(start),
                                   recs.begin() + static_cast<std::ptrdiff_t>(end));
    auto y = generator.Forward(LoadBatch(chunk, options.resize_to).to(dtype)).to(torch::kFloat32);
    for (size_t i = 0; i < chunk.size(); ++i) {
      std::string idx = FormatInt(static_cast<std::int64_t>(start + i));
      if (idx.size() < 5) idx.insert(0, 5 - idx.size(), '0');
      const fs::path path = out_dir / ("syn_" + idx + "_" + fs::path(chunk[i].path).stem().string() + ".png");
      WritePng(TensorToImage(y[static_cast<int64_t>(i)]), path);
      out.push_back({path.string(), options.target_label, options.target_domain, Split::kTrain, Origin::kSynthetic});
    }
  }
  return out;
}

}  // namespace argan
