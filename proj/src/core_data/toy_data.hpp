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
#ifndef ARGAN_CORE_DATA_TOY_DATA_HPP_
#define ARGAN_CORE_DATA_TOY_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>

#include "core_data/manifest.hpp"

namespace argan {

// Procedural stand-in for leaf photographs: a textured disk on a soil
// background, optionally carrying blob-shaped lesions of one colour style.
enum class LesionStyle { kNone, kBrown, kRust, kMildew, kBlight };

struct ToyClassSpec {
  std::string label;
  LesionStyle style = LesionStyle::kNone;
  int n_train = 0;
  int n_test = 0;
};

// Domain A: plain textured disks ("healthy"). Domain B: the same texture
// family overlaid with speckle lesions ("diseased"). Images land in
// work_dir/A and work_dir/B; manifests are also saved as
// work_dir/domain_A.csv and work_dir/domain_B.csv.
std::pair<DatasetManifest, DatasetManifest> MakeToyDomains(std::uint64_t seed, int n_per_domain,
                                                           int side,
                                                           const std::filesystem::path& work_dir);

// Multi-class toy dataset (train and test records in one manifest, domain A
// for the lesion-free class and B otherwise). Saved as work_dir/toy_classes.csv.
DatasetManifest MakeToyClasses(std::uint64_t seed, const std::vector<ToyClassSpec>& classes, int side,
                               const std::filesystem::path& work_dir);

// Default four-class layout with a 10:10:2:2 train imbalance.
std::vector<ToyClassSpec> DefaultToyClasses(int majority_train, int minority_train, int test_per_class);

// Single synthetic leaf image, exposed for tests.
cv::Mat RenderToyLeaf(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, int side,
                      LesionStyle style);

}  // namespace argan

#endif  // ARGAN_CORE_DATA_TOY_DATA_HPP_
