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
#ifndef ARGAN_CORE_DATA_MANIFEST_HPP_
#define ARGAN_CORE_DATA_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace argan {

enum class Domain { kA, kB };
enum class Split { kTrain, kTest };
enum class Origin { kReal, kClassicAug, kSynthetic };
enum class InstanceTag { kX, kXPlusXC, kXPlusXS, kCustom };

std::string_view ToString(Domain d);
std::string_view ToString(Split s);
std::string_view ToString(Origin o);
std::string_view ToString(InstanceTag t);
Domain ParseDomain(std::string_view text);
Split ParseSplit(std::string_view text);
Origin ParseOrigin(std::string_view text);
InstanceTag ParseInstanceTag(std::string_view text);

struct ImageRecord {
  std::string path;
  std::string class_label;
  Domain domain = Domain::kA;
  Split split = Split::kTrain;
  Origin origin = Origin::kReal;

  bool operator==(const ImageRecord&) const = default;
};

struct DatasetManifest {
  std::vector<ImageRecord> records;
  std::vector<std::string> label_set;
  InstanceTag instance_tag = InstanceTag::kCustom;

  bool HasLabel(std::string_view label) const;
  // Throws if a record label is missing from label_set, or if an X instance
  // contains non-real records.
  void Validate() const;
};

// Counts aligned with a label order; labels present in label_set but absent
// from the records carry a zero count.
class ClassDistribution {
 public:
  ClassDistribution() = default;
  ClassDistribution(std::vector<std::string> labels, std::vector<std::int64_t> counts);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t Count(std::string_view label) const;  // throws on unknown label
  bool Has(std::string_view label) const;
  std::int64_t Total() const;

  bool operator==(const ClassDistribution&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::int64_t> counts_;
};

using BalancePlan = std::map<std::string, std::int64_t>;

inline constexpr std::string_view kManifestHeader = "path,label,domain,split,origin";

// Relative record paths are resolved against the manifest's directory.
DatasetManifest LoadManifest(const std::filesystem::path& path);
// Record paths are written relative to the manifest's directory when they
// live below it, so a work directory can be relocated as a whole.
void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path);

ClassDistribution ComputeClassDistribution(const DatasetManifest& manifest);
void SaveDistributionCsv(const ClassDistribution& dist, const std::filesystem::path& path);

BalancePlan MakeBalancePlan(const ClassDistribution& dist, std::int64_t target_per_class,
                            const std::set<std::string>& frozen);

DatasetManifest BuildInstance(const DatasetManifest& base,
                              const std::vector<ImageRecord>& additions, InstanceTag tag);

struct RecordFilter {
  std::optional<Domain> domain;
  std::optional<Split> split;
  std::optional<std::string> class_label;
  std::optional<Origin> origin;
};

DatasetManifest FilterManifest(const DatasetManifest& manifest, const RecordFilter& filter);

}  // namespace argan

#endif  // ARGAN_CORE_DATA_MANIFEST_HPP_
