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
#include "networks/network.hpp"

#include <random>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace argan {

std::string_view ToString(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kGenerator: return "generator";
    case NetworkKind::kDiscriminator: return "discriminator";
    case NetworkKind::kFeatureExtractor: return "feature_extractor";
  }
  return "generator";
}

NetworkKind ParseNetworkKind(std::string_view text) {
  if (text == "generator") return NetworkKind::kGenerator;
  if (text == "discriminator") return NetworkKind::kDiscriminator;
  if (text == "feature_extractor") return NetworkKind::kFeatureExtractor;
  Fail(ErrorCode::kParse, "unknown network kind '" + std::string(text) + "'");
}

torch::Tensor InstanceNorm(const torch::Tensor& x, double eps) {
  auto [var, mean] = torch::var_mean(x, {2, 3}, /*correction=*/0, /*keepdim=*/true);
  return (x - mean) / torch::sqrt(var + eps);
}

namespace {

void Validate(NetworkKind kind, const ArchSpec& spec) {
  Require(!spec.tokens.empty(), "empty architecture spec", ErrorCode::kParse);
  auto is_c71 = [](const LayerToken& t) {
    return t.kind == LayerKind::kC && t.kernel == 7 && t.stride == Stride::kOne;
  };
  switch (kind) {
    case NetworkKind::kGenerator:
      Require(spec.head == Head::kTanhImage, "generator spec needs the tanh_image head", ErrorCode::kParse);
      Require(is_c71(spec.tokens.front()) && is_c71(spec.tokens.back()),
              "generator spec must start and end with C7-1 tokens", ErrorCode::kParse);
      Require(spec.tokens.back().filters == 3, "generator must end in 3 channels", ErrorCode::kParse);
      for (const auto& t : spec.tokens) {
        Require(t.kind != LayerKind::kP, "P tokens are discriminator-only", ErrorCode::kParse);
      }
      break;
    case NetworkKind::kDiscriminator:
      Require(spec.head == Head::kPatchLogits, "discriminator spec needs the patch_logits head",
              ErrorCode::kParse);
      for (const auto& t : spec.tokens) {
        Require(t.kind == LayerKind::kP, "discriminator spec may only contain P tokens", ErrorCode::kParse);
      }
      break;
    case NetworkKind::kFeatureExtractor:
      Require(spec.head == Head::kNone, "feature extractor spec takes no head", ErrorCode::kParse);
      for (const auto& t : spec.tokens) {
        Require(t.kind == LayerKind::kC || t.kind == LayerKind::kR,
                "feature extractor spec may only contain C and R tokens", ErrorCode::kParse);
      }
      break;
  }
}

}  // namespace

Network::Conv Network::MakeConv(const std::string& name, int in, int out, int kernel, int stride,
                                bool reflect, bool transposed) {
  Conv c;
  auto shape = transposed ? std::vector<int64_t>{in, out, kernel, kernel}
                          : std::vector<int64_t>{out, in, kernel, kernel};
  c.weight = params_.Add(name + ".weight", torch::zeros(shape));
  c.bias = params_.Add(name + ".bias", torch::zeros({out}));
  c.stride = stride;
  c.padding = transposed ? 1 : (kernel == 4 ? 1 : kernel / 2);
  c.reflect = reflect;
  c.transposed = transposed;
  return c;
}

Network::Network(NetworkKind kind, ArchSpec spec) : kind_(kind), spec_(std::move(spec)) {
  Validate(kind_, spec_);
  const bool reflect_family = kind_ != NetworkKind::kDiscriminator;
  int channels = 3;
  for (size_t i = 0; i < spec_.tokens.size(); ++i) {
    const LayerToken& t = spec_.tokens[i];
    const std::string name = "l" + std::to_string(i);
    const bool last = i + 1 == spec_.tokens.size();
    Stage stage;
    switch (t.kind) {
      case LayerKind::kC:
      case LayerKind::kD:
      case LayerKind::kP: {
        const int s = t.stride == Stride::kTwo ? 2 : 1;
        // Reflection padding for the 7×7 convs; down-sampling and patch
        // convs are zero padded.
        const bool reflect = reflect_family && t.kind == LayerKind::kC;
        stage.first.conv = MakeConv(name + ".conv", channels, t.filters, t.kernel, s, reflect, false);
        stage.first.norm = t.norm;
        stage.first.act = t.kind == LayerKind::kP ? Act::kLeaky : Act::kRelu;
        if (kind_ == NetworkKind::kGenerator && last) {
          stage.first.norm = false;
          stage.first.act = Act::kTanh;
        }
        break;
      }
      case LayerKind::kU:
        stage.first.conv = MakeConv(name + ".conv", channels, t.filters, t.kernel, 2, false, true);
        stage.first.norm = t.norm;
        stage.first.act = Act::kRelu;
        break;
      case LayerKind::kR: {
        const bool widen = t.filters != channels;
        stage.residual = true;
        stage.first.conv =
            MakeConv(name + ".conv1", channels, t.filters, t.kernel, widen ? 2 : 1, reflect_family, false);
        stage.first.norm = t.norm;
        stage.first.act = Act::kRelu;
        stage.second.conv = MakeConv(name + ".conv2", t.filters, t.filters, t.kernel, 1, reflect_family, false);
        stage.second.norm = t.norm;
        stage.second.act = Act::kNone;
        if (widen) {
          Conv proj = MakeConv(name + ".proj", channels, t.filters, 1, 2, false, false);
          proj.padding = 0;
          stage.projection = proj;
        }
        break;
      }
    }
    stages_.push_back(stage);
    channels = t.filters;
  }
  if (spec_.head == Head::kPatchLogits) {
    head_ = MakeConv("head", channels, 1, 4, 1, false, false);
  }
}

torch::Tensor Network::Apply(const Conv& c, const torch::Tensor& x) const {
  const auto& w = params_.at(c.weight);
  const auto& b = params_.at(c.bias);
  if (c.transposed) {
    return torch::conv_transpose2d(x, w, b, {c.stride, c.stride}, {c.padding, c.padding},
                                   /*output_padding=*/{1, 1});
  }
  if (c.reflect && c.padding > 0) {
    const std::vector<int64_t> pad{c.padding, c.padding, c.padding, c.padding};
    // Reflection needs pad < side; maps shrunk below that (tiny test inputs
    // deep in the feature extractor) fall back to edge replication.
    const bool fits = x.size(2) > c.padding && x.size(3) > c.padding;
    auto padded = fits ? torch::reflection_pad2d(x, pad) : torch::replication_pad2d(x, pad);
    return torch::conv2d(padded, w, b, torch::IntArrayRef{c.stride, c.stride}, torch::IntArrayRef{0, 0});
  }
  return torch::conv2d(x, w, b, torch::IntArrayRef{c.stride, c.stride},
                       torch::IntArrayRef{c.padding, c.padding});
}

torch::Tensor Network::Apply(const Block& block, const torch::Tensor& x) const {
  auto y = Apply(block.conv, x);
  if (block.norm) y = InstanceNorm(y);
  switch (block.act) {
    case Act::kRelu: return torch::relu(y);
    case Act::kLeaky: return torch::leaky_relu(y, kLeakySlope);
    case Act::kTanh: return torch::tanh(y);
    case Act::kNone: return y;
  }
  return y;
}

torch::Tensor Network::Run(const torch::Tensor& x, std::vector<torch::Tensor>* taps) const {
  Require(x.dim() == 4 && x.size(1) == 3, "expected an (N,3,H,W) input");
  torch::Tensor h = x.to(params_.at(0).scalar_type());
  for (const auto& stage : stages_) {
    if (!stage.residual) {
      h = Apply(stage.first, h);
      continue;
    }
    auto skip = stage.projection ? Apply(*stage.projection, h) : h;
    h = skip + Apply(stage.second, Apply(stage.first, h));
    if (taps) taps->push_back(h);
  }
  if (head_) h = Apply(*head_, h);
  return h;
}

torch::Tensor Network::Forward(const torch::Tensor& x) const {
  if (kind_ == NetworkKind::kFeatureExtractor) {
    auto taps = ForwardTaps(x);
    Require(!taps.empty(), "feature extractor without residual blocks");
    return taps.back();
  }
  return Run(x, nullptr);
}

std::vector<torch::Tensor> Network::ForwardTaps(const torch::Tensor& x) const {
  std::vector<torch::Tensor> taps;
  Run(x, &taps);
  return taps;
}

int Network::TapCount() const {
  int n = 0;
  for (const auto& s : stages_) n += s.residual ? 1 : 0;
  return n;
}

std::vector<int> Network::TapChannels() const {
  std::vector<int> out;
  for (const auto& t : spec_.tokens) {
    if (t.kind == LayerKind::kR) out.push_back(t.filters);
  }
  return out;
}

Network Network::Clone() const {
  Network copy = *this;
  copy.params_ = params_.Clone();
  return copy;
}

Network BuildGenerator(const ArchSpec& spec) { return Network(NetworkKind::kGenerator, spec); }
Network BuildDiscriminator(const ArchSpec& spec) { return Network(NetworkKind::kDiscriminator, spec); }
Network BuildFeatureExtractor(const ArchSpec& spec) { return Network(NetworkKind::kFeatureExtractor, spec); }

Network BuildNetwork(NetworkKind kind, const ArchSpec& spec) { return Network(kind, spec); }

void InitWeights(ParameterStore& params, double mean, double std, std::uint64_t seed) {
  Require(std > 0.0, "init std must be positive");
  Rng rng = DeriveRng({seed, 0x1417});
  std::normal_distribution<double> normal(mean, std);
  torch::NoGradGuard no_grad;
  for (auto& e : params.entries()) {
    if (!e.trainable) continue;
    const bool is_bias = e.name.size() >= 5 && e.name.compare(e.name.size() - 5, 5, ".bias") == 0;
    if (is_bias) {
      e.value.zero_();
      continue;
    }
    auto host = torch::empty({e.value.numel()}, torch::kFloat64);
    auto* p = host.data_ptr<double>();
    for (int64_t i = 0; i < host.numel(); ++i) p[i] = normal(rng);
    e.value.copy_(host.view(e.value.sizes()));
  }
}

void InitWeights(Network& net, double mean, double std, std::uint64_t seed) {
  InitWeights(net.params(), mean, std, seed);
}

std::int64_t ParamCount(const Network& net) { return net.ParamCount(); }

}  // namespace argan
