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
#ifndef ARGAN_PIPELINE_CHARTS_HPP_
#define ARGAN_PIPELINE_CHARTS_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace argan {

struct BarSeries {
  std::string name;
  std::vector<double> values;  // one per category; NaN leaves a gap
};

// Grouped vertical bars around a zero baseline, written as PNG.
void SaveBarChart(const std::filesystem::path& path, const std::string& title,
                  const std::vector<std::string>& categories, const std::vector<BarSeries>& series);

}  // namespace argan

#endif  // ARGAN_PIPELINE_CHARTS_HPP_
