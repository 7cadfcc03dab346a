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
#include "common/rng.hpp"

#include <sstream>

#include "common/error.hpp"

namespace argan {

std::string SerializeRng(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

Rng DeserializeRng(const std::string& text) {
  std::istringstream in(text);
  Rng rng;
  in >> rng;
  Require(!in.fail(), "corrupt rng state", ErrorCode::kParse);
  return rng;
}

}  // namespace argan
