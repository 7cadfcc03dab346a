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
#ifndef ARGAN_NETWORKS_ARCH_SPEC_HPP_
#define ARGAN_NETWORKS_ARCH_SPEC_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace argan {

// Token kinds:
//   C<k>-<s>-<n>  conv + instance norm + ReLU, stride s ∈ {1,2}
//   D<k>-2-<n>    stride-2 down conv + instance norm + ReLU
//   R<k>-<n>      residual block of two k×k convs
//   U<k>-<n>      stride-1/2 (transposed) conv + instance norm + ReLU
//   P<k>-<s>-<n>  conv + instance norm + leaky ReLU (stride 2 by default)
// A ":nonorm" suffix disables instance normalization for that token.
enum class LayerKind { kC, kD, kR, kU, kP };
enum class Stride { kOne, kTwo, kHalf };
enum class Head { kTanhImage, kPatchLogits, kNone };

struct LayerToken {
  LayerKind kind = LayerKind::kC;
  int kernel = 3;
  Stride stride = Stride::kOne;
  int filters = 1;
  bool norm = true;

  std::string ToString() const;
  bool operator==(const LayerToken&) const = default;
};

LayerToken ParseLayerToken(std::string_view text);

struct ArchSpec {
  std::vector<LayerToken> tokens;
  Head head = Head::kNone;

  // Comma separated token list, e.g. "C7-1-64, D3-2-128".
  static ArchSpec Parse(std::string_view text, Head head);
  std::string ToString() const;
  bool operator==(const ArchSpec&) const = default;
};

std::string_view ToString(Head head);
Head ParseHead(std::string_view text);

// Named presets. Generators: "resnet9" (default), "listing", "resnet6",
// "desk". Discriminators: "patch70" (default), "literal94", "desk".
// Feature extractors: "default", "desk".
ArchSpec GeneratorPreset(std::string_view name);
ArchSpec DiscriminatorPreset(std::string_view name);
ArchSpec FeatureExtractorPreset(std::string_view name);

// Accepts either a preset name or an explicit token list.
ArchSpec ResolveGeneratorSpec(std::string_view text);
ArchSpec ResolveDiscriminatorSpec(std::string_view text);
ArchSpec ResolveFeatureExtractorSpec(std::string_view text);

// Receptive field of one output unit, front-to-back recursion over the
// integer-stride convolutions (plus the k4s1 head for patch discriminators).
int ReceptiveField(const ArchSpec& spec);

}  // namespace argan

#endif  // ARGAN_NETWORKS_ARCH_SPEC_HPP_
