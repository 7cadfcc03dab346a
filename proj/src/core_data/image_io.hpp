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
#ifndef ARGAN_CORE_DATA_IMAGE_IO_HPP_
#define ARGAN_CORE_DATA_IMAGE_IO_HPP_

#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>
#include <torch/types.h>

#include "core_data/manifest.hpp"

namespace argan {

// 8-bit, 3-channel, RGB channel order.
cv::Mat ReadRgb(const std::filesystem::path& path);
void WritePng(const cv::Mat& rgb, const std::filesystem::path& path);

// Bicubic resize to side×side; returns the input unchanged when it already
// has that size.
cv::Mat ResizeBicubic(const cv::Mat& rgb, int side);

// (3,H,W) float tensor in [-1,1] from an RGB image: v ↦ 2v/255 − 1.
torch::Tensor ImageToTensor(const cv::Mat& rgb);
// Inverse remap [-1,1] → [0,255], rounded and saturated.
cv::Mat TensorToImage(const torch::Tensor& chw);

// (N,3,side,side) batch in [-1,1], records in order.
torch::Tensor LoadBatch(const std::vector<ImageRecord>& records, int resize_to);

}  // namespace argan

#endif  // ARGAN_CORE_DATA_IMAGE_IO_HPP_
