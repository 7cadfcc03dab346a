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
#ifndef ARGAN_COMMON_CONFIG_HPP_
#define ARGAN_COMMON_CONFIG_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace argan {

// Flat "key = value" settings. A "[section]" line prefixes the keys that
// follow with "section."; '#' starts a comment line. Duplicate keys are
// rejected.
using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(std::string_view text);
std::string FormatKeyValues(const KeyValues& values);

// Entries of `values` under "<section>." with the prefix stripped.
KeyValues Section(const KeyValues& values, std::string_view section);

bool ParseBool(std::string_view text);
// "0;1;2" or "0,1,2".
std::set<int> ParseIntSet(std::string_view text);
std::string FormatIntSet(const std::set<int>& values);

std::string Trim(std::string_view text);

}  // namespace argan

#endif  // ARGAN_COMMON_CONFIG_HPP_
