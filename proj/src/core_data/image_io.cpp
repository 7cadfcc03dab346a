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
#include "core_data/image_io.hpp"

#include <cstring>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "common/error.hpp"

namespace argan {

namespace fs = std::filesystem;

cv::Mat ReadRgb(const fs::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) Fail(ErrorCode::kIo, "unreadable or corrupt image: " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return rgb;
}

void WritePng(const cv::Mat& rgb, const fs::path& path) {
  Require(rgb.type() == CV_8UC3, "WritePng expects an 8-bit RGB image");
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    Fail(ErrorCode::kIo, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) Fail(ErrorCode::kIo, "cannot write " + path.string());
}

cv::Mat ResizeBicubic(const cv::Mat& rgb, int side) {
  Require(side > 0, "resize side must be positive");
  if (rgb.rows == side && rgb.cols == side) return rgb;
  cv::Mat out;
  cv::resize(rgb, out, cv::Size(side, side), 0, 0, cv::INTER_CUBIC);
  return out;
}

torch::Tensor ImageToTensor(const cv::Mat& rgb) {
  Require(rgb.type() == CV_8UC3, "expected an 8-bit RGB image");
  cv::Mat contiguous = rgb.isContinuous() ? rgb : rgb.clone();
  auto hwc = torch::from_blob(contiguous.data, {contiguous.rows, contiguous.cols, 3}, torch::kUInt8);
  return hwc.permute({2, 0, 1}).to(torch::kFloat32).mul(2.0 / 255.0).sub(1.0).contiguous();
}

cv::Mat TensorToImage(const torch::Tensor& chw) {
  Require(chw.dim() == 3 && chw.size(0) == 3, "expected a (3,H,W) tensor");
  auto bytes = chw.detach().to(torch::kFloat64).add(1.0).mul(127.5).round().clamp(0, 255)
                   .to(torch::kUInt8).permute({1, 2, 0}).contiguous();
  cv::Mat out(static_cast<int>(bytes.size(0)), static_cast<int>(bytes.size(1)), CV_8UC3);
  std::memcpy(out.data, bytes.data_ptr<std::uint8_t>(), static_cast<size_t>(bytes.numel()));
  return out;
}

torch::Tensor LoadBatch(const std::vector<ImageRecord>& records, int resize_to) {
  Require(resize_to > 0, "resize_to must be positive");
  auto batch = torch::empty({static_cast<int64_t>(records.size()), 3, resize_to, resize_to});
  for (size_t i = 0; i < records.size(); ++i) {
    batch[static_cast<int64_t>(i)].copy_(ImageToTensor(ResizeBicubic(ReadRgb(records[i].path), resize_to)));
  }
  return batch;
}

}  // namespace argan
