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
#ifndef ARGAN_NETWORKS_ARCHIVE_HPP_
#define ARGAN_NETWORKS_ARCHIVE_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <torch/types.h>

#include "networks/network.hpp"
#include "networks/parameter_store.hpp"

namespace argan {

// Binary checkpoint archive.
//
//   magic "ARGANARC", u32 version
//   u32 n_text,   n × { str name, str value }
//   u32 n_arrays, n × { str name, u8 dtype, u32 ndim, i64 dims[ndim], raw LE data }
//
// Strings are u64 length + bytes. Entries keep insertion order, so saving the
// same content twice yields byte-identical files.
class Archive {
 public:
  static constexpr std::string_view kMagic = "ARGANARC";
  static constexpr std::uint32_t kVersion = 1;

  void PutText(std::string name, std::string value);
  void PutTensor(std::string name, const torch::Tensor& value);

  bool HasText(std::string_view name) const;
  bool HasTensor(std::string_view name) const;
  const std::string& Text(std::string_view name) const;
  const torch::Tensor& Tensor(std::string_view name) const;

  const std::vector<std::pair<std::string, std::string>>& texts() const { return texts_; }
  const std::vector<std::pair<std::string, torch::Tensor>>& tensors() const { return tensors_; }

  std::string Serialize() const;
  static Archive Deserialize(std::string_view bytes);
  void Save(const std::filesystem::path& path) const;
  static Archive Load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> texts_;
  std::vector<std::pair<std::string, torch::Tensor>> tensors_;
};

// Stores every entry as "<prefix><name>".
void PutParameters(Archive& archive, const std::string& prefix, const ParameterStore& params);
void GetParameters(const Archive& archive, const std::string& prefix, ParameterStore& params);

// A network is saved under a role prefix ("" for standalone files), with
// "<role>kind" and "<role>spec" text entries.
void PutNetwork(Archive& archive, const std::string& role, const Network& net);
Network GetNetwork(const Archive& archive, const std::string& role);

void SaveNetwork(const Network& net, const std::filesystem::path& path);
// Loads a standalone network file, or the network stored under `role`
// (e.g. "G_AB/") inside a training checkpoint.
Network LoadNetwork(const std::filesystem::path& path, const std::string& role = "");

}  // namespace argan

#endif  // ARGAN_NETWORKS_ARCHIVE_HPP_
