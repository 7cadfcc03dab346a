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
#ifndef ARGAN_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define ARGAN_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include <torch/types.h>

#include "networks/network.hpp"

namespace argan::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::uint64_t HashFile(const std::filesystem::path& path);

// Two-layer generator "C7-1-<hidden>:nonorm, C7-1-3" whose weights make
// tanh(conv2(relu(conv1(x)))) ≈ x on [-1,1]: the first layer forms hinge
// features relu(±x_c − t) at the kernel centre, the second sums them into a
// piecewise-linear approximation of atanh. Diagnostic only.
Network MakeIdentityGenerator();

}  // namespace argan::testing

#endif  // ARGAN_TESTS_SUPPORT_TEST_SUPPORT_HPP_
