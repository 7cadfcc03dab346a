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
#include "core_data/manifest.hpp"

#include <algorithm>
#include <sstream>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

namespace fs = std::filesystem;

std::string_view ToString(Domain d) { return d == Domain::kA ? "A" : "B"; }
std::string_view ToString(Split s) { return s == Split::kTrain ? "train" : "test"; }

std::string_view ToString(Origin o) {
  switch (o) {
    case Origin::kReal: return "real";
    case Origin::kClassicAug: return "classic_aug";
    case Origin::kSynthetic: return "synthetic";
  }
  return "real";
}

std::string_view ToString(InstanceTag t) {
  switch (t) {
    case InstanceTag::kX: return "X";
    case InstanceTag::kXPlusXC: return "X_plus_XC";
    case InstanceTag::kXPlusXS: return "X_plus_XS";
    case InstanceTag::kCustom: return "custom";
  }
  return "custom";
}

Domain ParseDomain(std::string_view text) {
  if (text == "A") return Domain::kA;
  if (text == "B") return Domain::kB;
  Fail(ErrorCode::kParse, "unknown domain token '" + std::string(text) + "'");
}

Split ParseSplit(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  Fail(ErrorCode::kParse, "unknown split token '" + std::string(text) + "'");
}

Origin ParseOrigin(std::string_view text) {
  if (text == "real") return Origin::kReal;
  if (text == "classic_aug") return Origin::kClassicAug;
  if (text == "synthetic") return Origin::kSynthetic;
  Fail(ErrorCode::kParse, "unknown origin token '" + std::string(text) + "'");
}

InstanceTag ParseInstanceTag(std::string_view text) {
  if (text == "X") return InstanceTag::kX;
  if (text == "X_plus_XC") return InstanceTag::kXPlusXC;
  if (text == "X_plus_XS") return InstanceTag::kXPlusXS;
  if (text == "custom") return InstanceTag::kCustom;
  Fail(ErrorCode::kInvalidArgument, "unknown instance tag '" + std::string(text) + "'");
}

bool DatasetManifest::HasLabel(std::string_view label) const {
  return std::find(label_set.begin(), label_set.end(), label) != label_set.end();
}

void DatasetManifest::Validate() const {
  for (const auto& r : records) {
    Require(!r.path.empty(), "record with empty path");
    Require(HasLabel(r.class_label), "record label '" + r.class_label + "' not in label set");
    if (instance_tag == InstanceTag::kX) {
      Require(r.origin == Origin::kReal, "X instance holds a non-real record: " + r.path);
    }
  }
}

ClassDistribution::ClassDistribution(std::vector<std::string> labels,
                                     std::vector<std::int64_t> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  Require(labels_.size() == counts_.size(), "label/count size mismatch");
}

std::int64_t ClassDistribution::Count(std::string_view label) const {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return counts_[i];
  }
  Fail(ErrorCode::kInvalidArgument, "class '" + std::string(label) + "' not in distribution");
}

bool ClassDistribution::Has(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::int64_t ClassDistribution::Total() const {
  std::int64_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

DatasetManifest LoadManifest(const fs::path& path) {
  if (!fs::exists(path)) Fail(ErrorCode::kIo, "manifest not found: " + path.string());
  std::istringstream in(ReadTextFile(path));
  const fs::path base = path.parent_path();

  DatasetManifest manifest;
  bool declared_labels = false;
  bool seen_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = Trim(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      constexpr std::string_view kLabels = "# labels:";
      if (!seen_header && text.rfind(kLabels, 0) == 0) {
        std::string list = Trim(std::string_view(text).substr(kLabels.size()));
        std::stringstream ls(list);
        std::string item;
        while (std::getline(ls, item, ';')) {
          item = Trim(item);
          if (!item.empty()) manifest.label_set.push_back(item);
        }
        declared_labels = true;
      } else if (text.rfind("# instance:", 0) == 0) {
        manifest.instance_tag = ParseInstanceTag(Trim(std::string_view(text).substr(11)));
      }
      continue;
    }
    if (!seen_header) {
      if (text != kManifestHeader) {
        Fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                    ": expected header '" + std::string(kManifestHeader) + "'");
      }
      seen_header = true;
      continue;
    }
    CsvRow fields = SplitCsvRow(text);
    auto row_error = [&](const std::string& what) {
      Fail(ErrorCode::kParse,
           path.string() + ": malformed row " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 5) row_error("expected 5 fields, got " + std::to_string(fields.size()));
    ImageRecord rec;
    fs::path p = fields[0];
    if (p.empty()) row_error("empty path");
    rec.path = (p.is_relative() ? (base / p).lexically_normal() : p).string();
    rec.class_label = fields[1];
    if (rec.class_label.empty()) row_error("empty label");
    try {
      rec.domain = ParseDomain(fields[2]);
      rec.split = ParseSplit(fields[3]);
      rec.origin = ParseOrigin(fields[4]);
    } catch (const Error& e) {
      row_error(e.what());
    }
    if (declared_labels && !manifest.HasLabel(rec.class_label)) {
      row_error("label '" + rec.class_label + "' not declared");
    }
    manifest.records.push_back(std::move(rec));
  }
  if (!seen_header) Fail(ErrorCode::kParse, path.string() + ": missing header line");

  if (!declared_labels) {
    std::set<std::string> labels;
    for (const auto& r : manifest.records) labels.insert(r.class_label);
    manifest.label_set.assign(labels.begin(), labels.end());
  }
  manifest.Validate();
  return manifest;
}

void SaveManifest(const DatasetManifest& manifest, const fs::path& path) {
  manifest.Validate();
  const fs::path base = fs::absolute(path).parent_path().lexically_normal();
  std::string text = "# labels: ";
  for (size_t i = 0; i < manifest.label_set.size(); ++i) {
    if (i) text += ';';
    text += manifest.label_set[i];
  }
  text += "\n# instance: " + std::string(ToString(manifest.instance_tag)) + "\n";
  text += std::string(kManifestHeader) + "\n";
  for (const auto& r : manifest.records) {
    fs::path p = fs::absolute(r.path).lexically_normal();
    fs::path rel = p.lexically_relative(base);
    std::string shown = (!rel.empty() && *rel.begin() != "..") ? rel.string() : p.string();
    text += JoinCsvRow({shown, r.class_label, std::string(ToString(r.domain)),
                        std::string(ToString(r.split)), std::string(ToString(r.origin))});
    text += "\n";
  }
  WriteTextFile(path, text);
}

ClassDistribution ComputeClassDistribution(const DatasetManifest& manifest) {
  std::vector<std::int64_t> counts(manifest.label_set.size(), 0);
  for (const auto& r : manifest.records) {
    auto it = std::find(manifest.label_set.begin(), manifest.label_set.end(), r.class_label);
    Require(it != manifest.label_set.end(), "record label '" + r.class_label + "' not in label set");
    ++counts[static_cast<size_t>(it - manifest.label_set.begin())];
  }
  return ClassDistribution(manifest.label_set, std::move(counts));
}

void SaveDistributionCsv(const ClassDistribution& dist, const fs::path& path) {
  CsvWriter csv({"label", "count"});
  for (size_t i = 0; i < dist.labels().size(); ++i) {
    csv.Add({dist.labels()[i], FormatInt(dist.counts()[i])});
  }
  csv.Save(path);
}

BalancePlan MakeBalancePlan(const ClassDistribution& dist, std::int64_t target_per_class,
                            const std::set<std::string>& frozen) {
  Require(target_per_class > 0, "target_per_class must be positive");
  for (const auto& f : frozen) {
    Require(dist.Has(f), "frozen class '" + f + "' not present in distribution");
  }
  BalancePlan plan;
  for (size_t i = 0; i < dist.labels().size(); ++i) {
    const auto& label = dist.labels()[i];
    plan[label] = frozen.count(label) ? 0 : std::max<std::int64_t>(0, target_per_class - dist.counts()[i]);
  }
  return plan;
}

DatasetManifest BuildInstance(const DatasetManifest& base, const std::vector<ImageRecord>& additions,
                              InstanceTag tag) {
  DatasetManifest out = base;
  out.instance_tag = tag;
  for (const auto& r : additions) {
    Require(base.HasLabel(r.class_label),
            "addition label '" + r.class_label + "' outside the base label set");
    Require(r.origin != Origin::kReal, "instance additions must not be real records: " + r.path);
    out.records.push_back(r);
  }
  return out;
}

DatasetManifest FilterManifest(const DatasetManifest& manifest, const RecordFilter& filter) {
  DatasetManifest out;
  out.label_set = manifest.label_set;
  out.instance_tag = manifest.instance_tag;
  for (const auto& r : manifest.records) {
    if (filter.domain && r.domain != *filter.domain) continue;
    if (filter.split && r.split != *filter.split) continue;
    if (filter.class_label && r.class_label != *filter.class_label) continue;
    if (filter.origin && r.origin != *filter.origin) continue;
    out.records.push_back(r);
  }
  return out;
}

}  // namespace argan
