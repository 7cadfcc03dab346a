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
#include "classic_aug/classic_aug.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <opencv2/imgproc.hpp>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "core_data/image_io.hpp"

namespace argan {

namespace fs = std::filesystem;

void AugConfig::Validate() const {
  Require(rot_per_image >= 0 && dist_per_image >= 0 && flip_attempts_per_image >= 0,
          "augmentation counts must be non-negative");
  Require(angle_min >= 0 && angle_max <= 180 && angle_min <= angle_max, "angle range must lie within [0, 180]");
  Require(flip_prob >= 0 && flip_prob <= 1, "flip_prob must lie in [0,1]");
  Require(elastic_variants >= 1, "elastic_variants must be at least 1");
  Require(elastic_grid >= 2, "elastic_grid must be at least 2");
  Require(elastic_magnitude >= 0 && elastic_magnitude <= 0.5, "elastic_magnitude must lie in [0, 0.5]");
  Require(shear_max_deg >= 0 && shear_max_deg < 90, "shear_max_deg must lie in [0, 90)");
  Require(perspective_max >= 0 && perspective_max < 0.25, "perspective_max must lie in [0, 0.25)");
  Require(output_side >= 1, "output_side must be positive");
}

bool AugConfig::Set(const std::string& key, const std::string& v) {
  auto to_int = [](const std::string& s) { return static_cast<int>(ParseInt(s)); };
  if (key == "rot_per_image") rot_per_image = to_int(v);
  else if (key == "angle_min") angle_min = ParseReal(v);
  else if (key == "angle_max") angle_max = ParseReal(v);
  else if (key == "dist_per_image") dist_per_image = to_int(v);
  else if (key == "shear_max_deg") shear_max_deg = ParseReal(v);
  else if (key == "perspective_max") perspective_max = ParseReal(v);
  else if (key == "flip_attempts_per_image") flip_attempts_per_image = to_int(v);
  else if (key == "flip_prob") flip_prob = ParseReal(v);
  else if (key == "elastic_variants") elastic_variants = to_int(v);
  else if (key == "elastic_grid") elastic_grid = to_int(v);
  else if (key == "elastic_magnitude") elastic_magnitude = ParseReal(v);
  else if (key == "output_side") output_side = to_int(v);
  else if (key == "seed") seed = static_cast<std::uint64_t>(ParseInt(v));
  else return false;
  return true;
}

KeyValues AugConfig::ToKeyValues() const {
  return {{"rot_per_image", FormatInt(rot_per_image)},
          {"angle_min", FormatReal(angle_min)},
          {"angle_max", FormatReal(angle_max)},
          {"dist_per_image", FormatInt(dist_per_image)},
          {"shear_max_deg", FormatReal(shear_max_deg)},
          {"perspective_max", FormatReal(perspective_max)},
          {"flip_attempts_per_image", FormatInt(flip_attempts_per_image)},
          {"flip_prob", FormatReal(flip_prob)},
          {"elastic_variants", FormatInt(elastic_variants)},
          {"elastic_grid", FormatInt(elastic_grid)},
          {"elastic_magnitude", FormatReal(elastic_magnitude)},
          {"output_side", FormatInt(output_side)},
          {"seed", FormatInt(static_cast<std::int64_t>(seed))}};
}

cv::Mat Rotate(const cv::Mat& image, double angle_deg) {
  Require(angle_deg >= 0 && angle_deg <= 180, "rotation angle must lie in [0, 180]");
  if (angle_deg == 0.0) return image.clone();
  const cv::Point2f centre((image.cols - 1) * 0.5f, (image.rows - 1) * 0.5f);
  cv::Mat m = cv::getRotationMatrix2D(centre, angle_deg, 1.0);
  // Exact entries for quarter turns keep them lossless.
  if (angle_deg == 90.0 || angle_deg == 180.0) {
    const double c = angle_deg == 90.0 ? 0.0 : -1.0, s = angle_deg == 90.0 ? 1.0 : 0.0;
    m = (cv::Mat_<double>(2, 3) << c, s, (1 - c) * centre.x - s * centre.y, -s, c, s * centre.x + (1 - c) * centre.y);
  }
  cv::Mat out;
  cv::warpAffine(image, out, m, image.size(), cv::INTER_CUBIC, cv::BORDER_REFLECT_101);
  return out;
}

cv::Mat Distort(const cv::Mat& image, Rng& rng, const DistortParams& p) {
  const double w = image.cols, h = image.rows;
  const double cx = (w - 1) / 2, cy = (h - 1) / 2;
  const double shear = std::tan(UniformReal(rng, -p.shear_max_deg, p.shear_max_deg) * std::numbers::pi / 180.0);
  const bool horizontal = Bernoulli(rng, 0.5);
  const std::array<cv::Point2f, 4> src = {cv::Point2f(0, 0), cv::Point2f(static_cast<float>(w - 1), 0),
                                          cv::Point2f(static_cast<float>(w - 1), static_cast<float>(h - 1)),
                                          cv::Point2f(0, static_cast<float>(h - 1))};
  std::array<cv::Point2f, 4> dst;
  for (size_t i = 0; i < 4; ++i) {
    double x = src[i].x, y = src[i].y;
    if (horizontal) {
      x += shear * (y - cy);
    } else {
      y += shear * (x - cx);
    }
    x += UniformReal(rng, -p.perspective_max, p.perspective_max) * w;
    y += UniformReal(rng, -p.perspective_max, p.perspective_max) * h;
    dst[i] = cv::Point2f(static_cast<float>(x), static_cast<float>(y));
  }
  const cv::Mat m = cv::getPerspectiveTransform(src.data(), dst.data());
  cv::Mat out;
  cv::warpPerspective(image, out, m, image.size(), cv::INTER_CUBIC, cv::BORDER_REFLECT_101);
  return out;
}

cv::Mat Flip(const cv::Mat& image, FlipAxis axis, Rng& rng, double prob, bool* applied) {
  Require(prob >= 0 && prob <= 1, "flip probability must lie in [0,1]");
  const bool on = Bernoulli(rng, prob);
  if (applied) *applied = on;
  if (!on) return image.clone();
  cv::Mat out;
  cv::flip(image, out, axis == FlipAxis::kUpDown ? 0 : 1);
  return out;
}

DisplacementField ElasticField(int width, int height, int grid, Rng& rng, double magnitude) {
  Require(grid >= 2, "elastic grid must be at least 2");
  Require(width >= 1 && height >= 1, "image must be non-empty");
  const double cw = static_cast<double>(width) / grid, ch = static_cast<double>(height) / grid;
  const double radius = magnitude * std::min(cw, ch);
  const int n = grid + 1;
  std::vector<double> ox(static_cast<size_t>(n * n), 0.0), oy(static_cast<size_t>(n * n), 0.0);
  for (int j = 1; j < grid; ++j) {
    for (int i = 1; i < grid; ++i) {
      const double r = radius * std::sqrt(UniformReal(rng, 0, 1));
      const double theta = UniformReal(rng, 0, 2 * std::numbers::pi);
      ox[static_cast<size_t>(j * n + i)] = r * std::cos(theta);
      oy[static_cast<size_t>(j * n + i)] = r * std::sin(theta);
    }
  }
  DisplacementField f{cv::Mat(height, width, CV_32FC1), cv::Mat(height, width, CV_32FC1)};
  for (int y = 0; y < height; ++y) {
    const double gy = std::min((y + 0.5) / ch, grid - 1e-9);
    const int j = static_cast<int>(gy);
    const double ty = gy - j;
    for (int x = 0; x < width; ++x) {
      const double gx = std::min((x + 0.5) / cw, grid - 1e-9);
      const int i = static_cast<int>(gx);
      const double tx = gx - i;
      auto at = [&](const std::vector<double>& o, int jj, int ii) { return o[static_cast<size_t>(jj * n + ii)]; };
      auto lerp = [&](const std::vector<double>& o) {
        return (1 - ty) * ((1 - tx) * at(o, j, i) + tx * at(o, j, i + 1)) +
               ty * ((1 - tx) * at(o, j + 1, i) + tx * at(o, j + 1, i + 1));
      };
      f.dx.at<float>(y, x) = static_cast<float>(lerp(ox));
      f.dy.at<float>(y, x) = static_cast<float>(lerp(oy));
    }
  }
  return f;
}

cv::Mat ApplyDisplacement(const cv::Mat& image, const DisplacementField& field) {
  Require(field.dx.size() == image.size() && field.dy.size() == image.size(), "displacement field size mismatch");
  if (cv::countNonZero(field.dx) == 0 && cv::countNonZero(field.dy) == 0) return image.clone();
  cv::Mat map_x(image.size(), CV_32FC1), map_y(image.size(), CV_32FC1);
  for (int y = 0; y < image.rows; ++y) {
    for (int x = 0; x < image.cols; ++x) {
      map_x.at<float>(y, x) = static_cast<float>(x) + field.dx.at<float>(y, x);
      map_y.at<float>(y, x) = static_cast<float>(y) + field.dy.at<float>(y, x);
    }
  }
  cv::Mat out;
  cv::remap(image, out, map_x, map_y, cv::INTER_CUBIC, cv::BORDER_REFLECT_101);
  return out;
}

cv::Mat Elastic(const cv::Mat& image, int grid, Rng& rng, double magnitude) {
  return ApplyDisplacement(image, ElasticField(image.cols, image.rows, grid, rng, magnitude));
}

ClassicAugResult ClassicAugment(const std::vector<ImageRecord>& records, const AugConfig& c,
                                const fs::path& out_dir) {
  c.Validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  Require(!ec && fs::is_directory(out_dir), "cannot create output directory " + out_dir.string(), ErrorCode::kIo);

  ClassicAugResult result;
  std::set<std::string> stems;
  const DistortParams dp{c.shear_max_deg, c.perspective_max};
  for (size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const cv::Mat src = ReadRgb(rec.path);
    Rng up = DeriveRng({c.seed, r, 0});
    Rng el = DeriveRng({c.seed, r, 1});

    std::vector<std::pair<std::string, cv::Mat>> stage;  // (chain, image)
    AugCounts counts;
    for (int k = 0; k < c.rot_per_image; ++k) {
      stage.emplace_back("rot", Rotate(src, UniformReal(up, c.angle_min, c.angle_max)));
      ++counts.rotations;
    }
    for (int k = 0; k < c.dist_per_image; ++k) {
      stage.emplace_back("dist", Distort(src, up, dp));
      ++counts.distortions;
    }
    for (int k = 0; k < c.flip_attempts_per_image; ++k) {
      const FlipAxis axis = k % 2 == 0 ? FlipAxis::kUpDown : FlipAxis::kLeftRight;
      bool applied = false;
      cv::Mat flipped = Flip(src, axis, up, c.flip_prob, &applied);
      if (applied) {
        stage.emplace_back(axis == FlipAxis::kUpDown ? "flipud" : "fliplr", std::move(flipped));
        ++counts.flips;
      }
    }
    stage.emplace_back("orig", src);
    counts.elastic_variants = c.elastic_variants;

    std::string stem = fs::path(rec.path).stem().string();
    if (!stems.insert(stem).second) stem += "-r" + FormatInt(static_cast<std::int64_t>(r));
    int k = 0;
    for (const auto& [chain, img] : stage) {
      for (int e = 0; e < c.elastic_variants; ++e) {
        cv::Mat out = ResizeBicubic(Elastic(img, c.elastic_grid, el, c.elastic_magnitude), c.output_side);
        const fs::path path = out_dir / (stem + "__" + chain + "-elastic__" + FormatInt(k++) + ".png");
        WritePng(out, path);
        result.records.push_back({path.string(), rec.class_label, rec.domain, Split::kTrain, Origin::kClassicAug});
      }
    }
    result.counts.push_back(counts);
  }
  return result;
}

}  // namespace argan
