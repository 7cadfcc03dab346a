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
#include "common/config.hpp"

#include <sstream>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

std::string Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

KeyValues ParseKeyValues(std::string_view text) {
  KeyValues out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      Require(line.back() == ']' && line.size() > 2, "malformed section header at line " + FormatInt(line_no),
              ErrorCode::kParse);
      section = Trim(std::string_view(line).substr(1, line.size() - 2)) + ".";
      continue;
    }
    const auto eq = line.find('=');
    Require(eq != std::string::npos, "expected key = value at line " + FormatInt(line_no), ErrorCode::kParse);
    const std::string key = section + Trim(std::string_view(line).substr(0, eq));
    Require(key.size() > section.size(), "empty key at line " + FormatInt(line_no), ErrorCode::kParse);
    Require(!out.count(key), "duplicate key '" + key + "' at line " + FormatInt(line_no), ErrorCode::kParse);
    out[key] = Trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

std::string FormatKeyValues(const KeyValues& values) {
  std::string out;
  for (const auto& [k, v] : values) out += k + " = " + v + "\n";
  return out;
}

KeyValues Section(const KeyValues& values, std::string_view section) {
  KeyValues out;
  const std::string prefix = std::string(section) + ".";
  for (const auto& [k, v] : values) {
    if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
  }
  return out;
}

bool ParseBool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  Fail(ErrorCode::kParse, "expected a boolean, got '" + std::string(text) + "'");
}

std::set<int> ParseIntSet(std::string_view text) {
  std::set<int> out;
  std::string item;
  auto flush = [&] {
    const auto t = Trim(item);
    if (!t.empty()) out.insert(static_cast<int>(ParseInt(t)));
    item.clear();
  };
  for (char c : text) {
    if (c == ';' || c == ',') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  return out;
}

std::string FormatIntSet(const std::set<int>& values) {
  std::string out;
  for (int v : values) out += (out.empty() ? "" : ";") + FormatInt(v);
  return out;
}

}  // namespace argan
