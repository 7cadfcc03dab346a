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
#ifndef ARGAN_COMMON_CSV_HPP_
#define ARGAN_COMMON_CSV_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace argan {

using CsvRow = std::vector<std::string>;

// Shortest decimal text that round-trips the value ('.' decimal point,
// locale independent). Non-finite values print as "nan"/"inf"/"-inf".
std::string FormatReal(double value);
std::string FormatInt(std::int64_t value);

double ParseReal(std::string_view text);
std::int64_t ParseInt(std::string_view text);

std::string JoinCsvRow(const CsvRow& fields);
CsvRow SplitCsvRow(std::string_view line);

class CsvWriter {
 public:
  explicit CsvWriter(CsvRow header);

  void Add(CsvRow row);
  std::string ToString() const;
  // Writes atomically-enough for our purposes: to a sibling temp file, then
  // renamed over the destination.
  void Save(const std::filesystem::path& path) const;

 private:
  CsvRow header_;
  std::vector<CsvRow> rows_;
};

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  int Column(std::string_view name) const;  // -1 when missing
};

CsvTable ReadCsv(const std::filesystem::path& path);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace argan

#endif  // ARGAN_COMMON_CSV_HPP_
