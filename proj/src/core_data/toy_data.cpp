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
#include "core_data/toy_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "core_data/image_io.hpp"

namespace argan {

namespace fs = std::filesystem;

namespace {

struct Rgb {
  double r, g, b;
};

struct Wave {
  double fx, fy, phase, amp;
};

Rgb LesionColor(LesionStyle style, Rng& rng) {
  const double j = UniformReal(rng, -12.0, 12.0);
  switch (style) {
    case LesionStyle::kBrown: return {125 + j, 72 + j, 32 + j};
    case LesionStyle::kRust: return {196 + j, 104 + j, 28};
    case LesionStyle::kMildew: return {232 + j / 2, 232 + j / 2, 214 + j / 2};
    case LesionStyle::kBlight: return {48 + j / 2, 34 + j / 2, 26};
    case LesionStyle::kNone: break;
  }
  return {0, 0, 0};
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    Fail(ErrorCode::kIo, "unwritable working directory: " + dir.string());
  }
}

std::string ImageName(std::string_view prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*s_%05d.png", static_cast<int>(prefix.size()), prefix.data(), index);
  return buf;
}

}  // namespace

cv::Mat RenderToyLeaf(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, int side,
                      LesionStyle style) {
  Require(side > 0 && side % 4 == 0, "toy image side must be a positive multiple of 4");
  Rng rng = DeriveRng({seed, stream, index});
  const double s = side;
  const double cx = s / 2 + UniformReal(rng, -0.08, 0.08) * s;
  const double cy = s / 2 + UniformReal(rng, -0.08, 0.08) * s;
  const double radius = UniformReal(rng, 0.30, 0.40) * s;
  const Rgb leaf{UniformReal(rng, 40, 75), UniformReal(rng, 120, 170), UniformReal(rng, 30, 60)};
  const Rgb soil{UniformReal(rng, 70, 100), UniformReal(rng, 55, 75), UniformReal(rng, 35, 50)};

  std::array<Wave, 3> waves;
  for (auto& w : waves) {
    w = {UniformReal(rng, 1.0, 4.0) / s, UniformReal(rng, 1.0, 4.0) / s,
         UniformReal(rng, 0.0, 2 * M_PI), UniformReal(rng, 6.0, 14.0)};
  }

  struct Blob {
    double x, y, r;
    Rgb color;
  };
  std::vector<Blob> blobs;
  if (style != LesionStyle::kNone) {
    const int count = static_cast<int>(UniformIndex(rng, 6)) + 5;
    for (int i = 0; i < count; ++i) {
      const double a = UniformReal(rng, 0, 2 * M_PI);
      const double d = std::sqrt(UniformReal(rng, 0, 1)) * radius * 0.8;
      blobs.push_back({cx + d * std::cos(a), cy + d * std::sin(a),
                       UniformReal(rng, 1.0 / 24, 1.0 / 12) * s, LesionColor(style, rng)});
    }
  }

  cv::Mat img(side, side, CV_8UC3);
  for (int y = 0; y < side; ++y) {
    auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < side; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const double noise = UniformReal(rng, -6.0, 6.0);
      const double dist = std::hypot(px - cx, py - cy);
      // Anti-aliased disk edge over ~1.5 px.
      const double inside = std::clamp((radius - dist) / 1.5 + 0.5, 0.0, 1.0);
      double tex = 0.0;
      for (const auto& w : waves) tex += w.amp * std::sin(2 * M_PI * (w.fx * px + w.fy * py) + w.phase);
      Rgb c{soil.r + noise, soil.g + noise, soil.b + noise};
      Rgb l{leaf.r + 0.3 * tex + noise, leaf.g + tex + noise, leaf.b + 0.3 * tex + noise};
      for (const auto& b : blobs) {
        const double bd = std::hypot(px - b.x, py - b.y) / b.r;
        if (bd >= 1.0) continue;
        const double alpha = std::sqrt(1.0 - bd * bd);
        l = {l.r + alpha * (b.color.r - l.r), l.g + alpha * (b.color.g - l.g),
             l.b + alpha * (b.color.b - l.b)};
      }
      c = {c.r + inside * (l.r - c.r), c.g + inside * (l.g - c.g), c.b + inside * (l.b - c.b)};
      row[x] = cv::Vec3b(cv::saturate_cast<uchar>(c.r), cv::saturate_cast<uchar>(c.g),
                         cv::saturate_cast<uchar>(c.b));
    }
  }
  return img;
}

std::pair<DatasetManifest, DatasetManifest> MakeToyDomains(std::uint64_t seed, int n_per_domain, int side,
                                                           const fs::path& work_dir) {
  Require(n_per_domain > 0, "n_per_domain must be positive");
  Require(side > 0 && side % 4 == 0, "side must be a positive multiple of 4");
  EnsureDirectory(work_dir / "A");
  EnsureDirectory(work_dir / "B");

  DatasetManifest a, b;
  a.label_set = {"healthy"};
  b.label_set = {"diseased"};
  for (int i = 0; i < n_per_domain; ++i) {
    const fs::path pa = work_dir / "A" / ImageName("a", i);
    const fs::path pb = work_dir / "B" / ImageName("b", i);
    WritePng(RenderToyLeaf(seed, 0, static_cast<std::uint64_t>(i), side, LesionStyle::kNone), pa);
    WritePng(RenderToyLeaf(seed, 1, static_cast<std::uint64_t>(i), side, LesionStyle::kBrown), pb);
    a.records.push_back({pa.string(), "healthy", Domain::kA, Split::kTrain, Origin::kReal});
    b.records.push_back({pb.string(), "diseased", Domain::kB, Split::kTrain, Origin::kReal});
  }
  SaveManifest(a, work_dir / "domain_A.csv");
  SaveManifest(b, work_dir / "domain_B.csv");
  return {a, b};
}

DatasetManifest MakeToyClasses(std::uint64_t seed, const std::vector<ToyClassSpec>& classes, int side,
                               const fs::path& work_dir) {
  Require(!classes.empty(), "no toy classes requested");
  DatasetManifest m;
  m.instance_tag = InstanceTag::kCustom;
  for (size_t k = 0; k < classes.size(); ++k) {
    const auto& spec = classes[k];
    Require(!spec.label.empty(), "toy class without a label");
    m.label_set.push_back(spec.label);
    const fs::path dir = work_dir / spec.label;
    EnsureDirectory(dir);
    const Domain domain = spec.style == LesionStyle::kNone ? Domain::kA : Domain::kB;
    for (int i = 0; i < spec.n_train + spec.n_test; ++i) {
      const bool train = i < spec.n_train;
      const fs::path p = dir / ImageName(train ? "train" : "test", i);
      // Stream 100+k keeps class images disjoint from the two-domain set.
      WritePng(RenderToyLeaf(seed, 100 + k, static_cast<std::uint64_t>(i), side, spec.style), p);
      m.records.push_back({p.string(), spec.label, domain, train ? Split::kTrain : Split::kTest,
                           Origin::kReal});
    }
  }
  SaveManifest(m, work_dir / "toy_classes.csv");
  return m;
}

std::vector<ToyClassSpec> DefaultToyClasses(int majority_train, int minority_train, int test_per_class) {
  return {{"healthy", LesionStyle::kNone, majority_train, test_per_class},
          {"rust", LesionStyle::kRust, majority_train, test_per_class},
          {"mildew", LesionStyle::kMildew, minority_train, test_per_class},
          {"blight", LesionStyle::kBlight, minority_train, test_per_class}};
}

}  // namespace argan
