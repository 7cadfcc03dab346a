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
#ifndef ARGAN_NETWORKS_NETWORK_HPP_
#define ARGAN_NETWORKS_NETWORK_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <torch/types.h>

#include "networks/arch_spec.hpp"
#include "networks/parameter_store.hpp"

namespace argan {

enum class NetworkKind { kGenerator, kDiscriminator, kFeatureExtractor };

std::string_view ToString(NetworkKind kind);
NetworkKind ParseNetworkKind(std::string_view text);

inline constexpr double kInstanceNormEps = 1e-5;
inline constexpr double kLeakySlope = 0.2;

// Per-sample, per-channel standardization without affine parameters.
torch::Tensor InstanceNorm(const torch::Tensor& x, double eps = kInstanceNormEps);

// A network assembled from layer tokens. Generators and feature extractors
// use reflection padding for their 7×7 and residual convolutions;
// discriminators zero-pad. Parameters start at zero; call InitWeights.
class Network {
 public:
  Network(NetworkKind kind, ArchSpec spec);

  NetworkKind kind() const { return kind_; }
  const ArchSpec& spec() const { return spec_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  torch::Tensor Forward(const torch::Tensor& x) const;
  // Outputs of every residual block, in order.
  std::vector<torch::Tensor> ForwardTaps(const torch::Tensor& x) const;
  int TapCount() const;
  std::vector<int> TapChannels() const;

  std::int64_t ParamCount() const { return params_.ElementCount(); }
  Network Clone() const;
  void To(torch::Dtype dtype) { params_.To(dtype); }

 private:
  enum class Act { kNone, kRelu, kLeaky, kTanh };
  struct Conv {
    size_t weight = 0;
    size_t bias = 0;
    int64_t stride = 1;
    int64_t padding = 0;
    bool reflect = false;
    bool transposed = false;
  };
  struct Block {
    Conv conv;
    bool norm = true;
    Act act = Act::kRelu;
  };
  struct Stage {
    bool residual = false;
    Block first;
    Block second;  // residual only
    std::optional<Conv> projection;
  };

  Conv MakeConv(const std::string& name, int in, int out, int kernel, int stride, bool reflect,
                bool transposed);
  torch::Tensor Apply(const Conv& conv, const torch::Tensor& x) const;
  torch::Tensor Apply(const Block& block, const torch::Tensor& x) const;
  torch::Tensor Run(const torch::Tensor& x, std::vector<torch::Tensor>* taps) const;

  NetworkKind kind_;
  ArchSpec spec_;
  ParameterStore params_;
  std::vector<Stage> stages_;
  std::optional<Conv> head_;
};

Network BuildGenerator(const ArchSpec& spec);
Network BuildDiscriminator(const ArchSpec& spec);
Network BuildFeatureExtractor(const ArchSpec& spec);
Network BuildNetwork(NetworkKind kind, const ArchSpec& spec);

// Weights ~ N(mean, std²) i.i.d. in store order, biases zero.
void InitWeights(Network& net, double mean, double std, std::uint64_t seed);
void InitWeights(ParameterStore& params, double mean, double std, std::uint64_t seed);

std::int64_t ParamCount(const Network& net);

}  // namespace argan

#endif  // ARGAN_NETWORKS_NETWORK_HPP_
