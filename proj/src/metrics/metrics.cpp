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
#include "metrics/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include <Eigen/Eigenvalues>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

namespace {

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

Moments ComputeMoments(const Eigen::MatrixXd& x) {
  Require(x.rows() >= 2, "FID needs at least two samples per set");
  Require(x.allFinite(), "FID features must be finite", ErrorCode::kNumeric);
  Moments m;
  m.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  return m;
}

Eigen::VectorXd ClippedEigenvalues(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  Require(es.info() == Eigen::Success, "eigen decomposition failed", ErrorCode::kNumeric);
  Eigen::VectorXd ev = es.eigenvalues();
  const double floor = -1e-6 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    Require(ev[i] >= floor || ev[i] >= -1e-12, "covariance product has a significantly negative eigenvalue",
            ErrorCode::kNumeric);
    ev[i] = std::max(ev[i], 0.0);
  }
  return ev;
}

Eigen::MatrixXd SymmetricSqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Require(es.info() == Eigen::Success, "eigen decomposition failed", ErrorCode::kNumeric);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

FeatureSet ExtractFeatures(const Network& extractor, int tap, const torch::Tensor& images, std::string source) {
  const int taps = extractor.TapCount();
  const int index = tap < 0 ? taps + tap : tap;
  Require(index >= 0 && index < taps, "tap index " + FormatInt(tap) + " out of range");
  Require(images.dim() == 4 && images.size(1) == 3, "images must be (N,3,H,W)");
  torch::NoGradGuard no_grad;
  const auto dtype = extractor.params().entries().front().value.scalar_type();
  std::vector<torch::Tensor> rows;
  for (int64_t s = 0; s < images.size(0); ++s) {
    auto chunk = images.slice(0, s, s + 1).to(dtype);
    rows.push_back(extractor.ForwardTaps(chunk)[static_cast<size_t>(index)].mean({2, 3}));
  }
  FeatureSet out;
  out.source = std::move(source);
  if (rows.empty()) return out;
  auto all = torch::cat(rows).to(torch::kFloat64).contiguous();
  out.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      all.data_ptr<double>(), all.size(0), all.size(1));
  return out;
}

double Fid(const FeatureSet& x, const FeatureSet& y) {
  Require(x.features.cols() == y.features.cols(), "FID feature dimensions differ");
  const Moments mx = ComputeMoments(x.features);
  const Moments my = ComputeMoments(y.features);
  const Eigen::MatrixXd sx = SymmetricSqrt(mx.cov);
  Eigen::MatrixXd m = sx * my.cov * sx;
  m = 0.5 * (m + m.transpose());
  const double tr_sqrt = ClippedEigenvalues(m).cwiseSqrt().sum();
  const double d = (mx.mean - my.mean).squaredNorm() + mx.cov.trace() + my.cov.trace() - 2.0 * tr_sqrt;
  Require(std::isfinite(d), "FID is not finite", ErrorCode::kNumeric);
  return std::max(d, 0.0);
}

SegScores ComputeSegScores(const std::vector<SegPair>& pairs) {
  Require(!pairs.empty(), "segmentation scores need at least one pair");
  const int n = pairs.front().n_labels;
  Require(n >= 1, "n_labels must be positive");
  std::vector<std::int64_t> correct(static_cast<size_t>(n)), in_truth(static_cast<size_t>(n)),
      in_pred(static_cast<size_t>(n));
  std::int64_t total = 0, hits = 0;
  for (const auto& p : pairs) {
    Require(p.n_labels == n, "inconsistent n_labels across pairs");
    Require(p.predicted.size() == p.truth.size(), "label maps differ in size");
    for (size_t i = 0; i < p.truth.size(); ++i) {
      const int t = p.truth[i], q = p.predicted[i];
      Require(t >= 0 && t < n && q >= 0 && q < n, "label out of range");
      ++in_truth[static_cast<size_t>(t)];
      ++in_pred[static_cast<size_t>(q)];
      if (t == q) {
        ++correct[static_cast<size_t>(t)];
        ++hits;
      }
      ++total;
    }
  }
  Require(total > 0, "segmentation maps are empty");
  SegScores s;
  s.ppa = static_cast<double>(hits) / static_cast<double>(total);
  int truth_labels = 0, union_labels = 0;
  for (size_t c = 0; c < static_cast<size_t>(n); ++c) {
    if (in_truth[c] > 0) {
      ++truth_labels;
      if (in_pred[c] > 0) s.pca += static_cast<double>(correct[c]) / static_cast<double>(in_pred[c]);
      s.pca_recall += static_cast<double>(correct[c]) / static_cast<double>(in_truth[c]);
    }
    const auto uni = in_truth[c] + in_pred[c] - correct[c];
    if (uni > 0) {
      ++union_labels;
      s.class_iou += static_cast<double>(correct[c]) / static_cast<double>(uni);
    }
  }
  s.pca /= truth_labels;
  s.pca_recall /= truth_labels;
  s.class_iou /= union_labels;
  return s;
}

ImageScorer CommandScorer(std::string command) {
  return [command = std::move(command)](const std::string& path) {
    std::string quoted = "'";
    for (char c : path) quoted += c == '\'' ? std::string("'\\''") : std::string(1, c);
    quoted += "'";
    const std::string full = command + " " + quoted;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(full.c_str(), "r"), pclose);
    Require(pipe != nullptr, "cannot run scorer for " + path, ErrorCode::kIo);
    std::array<char, 256> buf{};
    std::string line;
    if (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe.get())) line = buf.data();
    const int status = pclose(pipe.release());
    Require(status == 0, "scorer failed for " + path, ErrorCode::kIo);
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) line.pop_back();
    try {
      return ParseReal(line);
    } catch (const Error&) {
      Fail(ErrorCode::kParse, "scorer output for " + path + " is not a number: '" + line + "'");
    }
  };
}

MeanStd NimaScore(const ImageScorer& scorer, const std::vector<std::string>& paths) {
  Require(!paths.empty(), "NIMA needs at least one image");
  std::vector<double> v;
  for (const auto& p : paths) {
    double s = 0;
    try {
      s = scorer(p);
    } catch (const Error& e) {
      Fail(e.code(), std::string(e.what()).find(p) == std::string::npos ? p + ": " + e.what() : e.what());
    }
    Require(std::isfinite(s), "scorer returned a non-finite value for " + p, ErrorCode::kNumeric);
    v.push_back(s);
  }
  MeanStd r;
  r.n = static_cast<std::int64_t>(v.size());
  for (double s : v) r.mean += s;
  r.mean /= static_cast<double>(r.n);
  double ss = 0;
  for (double s : v) ss += (s - r.mean) * (s - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(r.n));
  return r;
}

void SaveMetricsCsv(const std::vector<MetricRow>& rows, const std::filesystem::path& path) {
  CsvWriter w(SplitCsvRow(kMetricsHeader));
  for (const auto& r : rows) w.Add({r.metric, FormatReal(r.value), FormatInt(r.n), r.notes});
  w.Save(path);
}

std::vector<MetricRow> LoadMetricsCsv(const std::filesystem::path& path) {
  const auto t = ReadCsv(path);
  Require(JoinCsvRow(t.header) == kMetricsHeader, "unexpected metrics header in " + path.string(), ErrorCode::kParse);
  std::vector<MetricRow> out;
  for (const auto& r : t.rows) {
    Require(r.size() == 4, "malformed metrics row in " + path.string(), ErrorCode::kParse);
    out.push_back({r[0], ParseReal(r[1]), ParseInt(r[2]), r[3]});
  }
  return out;
}

}  // namespace argan
