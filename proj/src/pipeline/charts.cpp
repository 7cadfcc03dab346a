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
#include "pipeline/charts.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "common/error.hpp"
#include "core_data/image_io.hpp"

namespace argan {
namespace {

const cv::Scalar kPalette[] = {{70, 110, 200}, {230, 150, 60}, {80, 170, 90}, {190, 80, 80}, {140, 100, 180}};
constexpr int kBar = 16, kGap = 22, kLeft = 64, kTop = 56, kPlotH = 260, kBottom = 70;

void Text(cv::Mat& img, const std::string& s, cv::Point at, double scale = 0.4) {
  cv::putText(img, s, at, cv::FONT_HERSHEY_SIMPLEX, scale, {30, 30, 30}, 1, cv::LINE_AA);
}

std::string Short(const std::string& s, size_t n) { return s.size() <= n ? s : s.substr(0, n - 1) + "."; }

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void SaveBarChart(const std::filesystem::path& path, const std::string& title,
                  const std::vector<std::string>& categories, const std::vector<BarSeries>& series) {
  Require(!categories.empty() && !series.empty(), "bar chart needs categories and series");
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    Require(s.values.size() == categories.size(), "bar chart series length mismatch: " + s.name);
    for (double v : s.values) {
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const int group = static_cast<int>(series.size()) * kBar + kGap;
  const int width = kLeft + static_cast<int>(categories.size()) * group + 20;
  const int height = kTop + kPlotH + kBottom;
  cv::Mat img(height, std::max(width, 320), CV_8UC3, cv::Scalar(255, 255, 255));

  auto y_of = [&](double v) { return kTop + static_cast<int>(std::lround((hi - v) / (hi - lo) * kPlotH)); };
  Text(img, title, {10, 20}, 0.5);
  for (size_t s = 0; s < series.size(); ++s) {
    const int x = 10 + static_cast<int>(s) * 120;
    cv::rectangle(img, {x, 30}, {x + 10, 40}, kPalette[s % 5], cv::FILLED);
    Text(img, Short(series[s].name, 14), {x + 14, 40});
  }
  for (double v : {lo, (lo + hi) / 2, hi}) {
    const int y = y_of(v);
    cv::line(img, {kLeft - 4, y}, {img.cols - 10, y}, {225, 225, 225}, 1);
    Text(img, Tick(v), {6, y + 4}, 0.35);
  }
  const int y0 = y_of(0.0);
  cv::line(img, {kLeft - 4, y0}, {img.cols - 10, y0}, {60, 60, 60}, 1);

  for (size_t c = 0; c < categories.size(); ++c) {
    const int gx = kLeft + static_cast<int>(c) * group;
    for (size_t s = 0; s < series.size(); ++s) {
      const double v = series[s].values[c];
      if (!std::isfinite(v)) continue;
      const int x = gx + static_cast<int>(s) * kBar;
      cv::rectangle(img, {x, std::min(y0, y_of(v))}, {x + kBar - 3, std::max(y0, y_of(v))}, kPalette[s % 5],
                    cv::FILLED);
    }
    Text(img, Short(categories[c], 9), {gx, kTop + kPlotH + 18 + 14 * static_cast<int>(c % 2)}, 0.35);
  }
  cv::Mat rgb;
  cv::cvtColor(img, rgb, cv::COLOR_BGR2RGB);  // WritePng expects RGB
  WritePng(rgb, path);
}

}  // namespace argan
