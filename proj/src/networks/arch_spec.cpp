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
#include "networks/arch_spec.hpp"

#include <charconv>
#include <sstream>

#include "common/error.hpp"

namespace argan {

namespace {

int ParsePositive(std::string_view text, std::string_view token) {
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value <= 0) {
    Fail(ErrorCode::kParse, "malformed spec token '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitOn(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::string Repeat(std::string_view token, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += token;
  }
  return out;
}

}  // namespace

LayerToken ParseLayerToken(std::string_view raw) {
  std::string_view text = Trim(raw);
  const std::string token(text);
  LayerToken t;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    if (text.substr(colon + 1) != "nonorm") {
      Fail(ErrorCode::kParse, "malformed spec token '" + token + "'");
    }
    t.norm = false;
    text = text.substr(0, colon);
  }
  if (text.size() < 2) Fail(ErrorCode::kParse, "malformed spec token '" + token + "'");
  switch (text[0]) {
    case 'C': t.kind = LayerKind::kC; break;
    case 'D': t.kind = LayerKind::kD; break;
    case 'R': t.kind = LayerKind::kR; break;
    case 'U': t.kind = LayerKind::kU; break;
    case 'P': t.kind = LayerKind::kP; break;
    default: Fail(ErrorCode::kParse, "unknown layer kind in token '" + token + "'");
  }
  auto parts = SplitOn(text.substr(1), '-');
  const bool has_stride = t.kind == LayerKind::kC || t.kind == LayerKind::kD || t.kind == LayerKind::kP;
  if (parts.size() != (has_stride ? 3u : 2u)) {
    Fail(ErrorCode::kParse, "malformed spec token '" + token + "'");
  }
  t.kernel = ParsePositive(parts[0], token);
  t.filters = ParsePositive(parts.back(), token);
  if (t.kernel != 3 && t.kernel != 4 && t.kernel != 7) {
    Fail(ErrorCode::kParse, "kernel must be 3, 4 or 7 in token '" + token + "'");
  }
  if (has_stride) {
    const int s = ParsePositive(parts[1], token);
    if (s != 1 && s != 2) Fail(ErrorCode::kParse, "stride must be 1 or 2 in token '" + token + "'");
    t.stride = s == 1 ? Stride::kOne : Stride::kTwo;
    if (t.kind == LayerKind::kD && t.stride != Stride::kTwo) {
      Fail(ErrorCode::kParse, "D tokens are stride 2: '" + token + "'");
    }
  } else {
    t.stride = t.kind == LayerKind::kU ? Stride::kHalf : Stride::kOne;
  }
  return t;
}

std::string LayerToken::ToString() const {
  std::ostringstream out;
  const char kinds[] = {'C', 'D', 'R', 'U', 'P'};
  out << kinds[static_cast<int>(kind)] << kernel;
  if (kind == LayerKind::kC || kind == LayerKind::kD || kind == LayerKind::kP) {
    out << '-' << (stride == Stride::kTwo ? 2 : 1);
  }
  out << '-' << filters;
  if (!norm) out << ":nonorm";
  return out.str();
}

ArchSpec ArchSpec::Parse(std::string_view text, Head head) {
  ArchSpec spec;
  spec.head = head;
  for (auto part : SplitOn(text, ',')) {
    if (Trim(part).empty()) continue;
    spec.tokens.push_back(ParseLayerToken(part));
  }
  return spec;
}

std::string ArchSpec::ToString() const {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ", ";
    out += tokens[i].ToString();
  }
  return out;
}

std::string_view ToString(Head head) {
  switch (head) {
    case Head::kTanhImage: return "tanh_image";
    case Head::kPatchLogits: return "patch_logits";
    case Head::kNone: return "none";
  }
  return "none";
}

Head ParseHead(std::string_view text) {
  if (text == "tanh_image") return Head::kTanhImage;
  if (text == "patch_logits") return Head::kPatchLogits;
  if (text == "none") return Head::kNone;
  Fail(ErrorCode::kParse, "unknown head '" + std::string(text) + "'");
}

ArchSpec GeneratorPreset(std::string_view name) {
  std::string text;
  if (name == "resnet9") {
    text = "C7-1-64, D3-2-128, D3-2-256, " + Repeat("R3-256", 9) + ", U3-128, U3-64, C7-1-3";
  } else if (name == "resnet6") {
    text = "C7-1-64, D3-2-128, D3-2-256, " + Repeat("R3-256", 6) + ", U3-128, U3-64, C7-1-3";
  } else if (name == "listing") {
    text = "C7-1-32, D3-2-64, D3-2-128, " + Repeat("R3-128", 8) + ", U3-64, U3-32, C7-1-3";
  } else if (name == "desk") {
    text = "C7-1-32, D3-2-64, D3-2-128, " + Repeat("R3-128", 3) + ", U3-64, U3-32, C7-1-3";
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown generator preset '" + std::string(name) + "'");
  }
  return ArchSpec::Parse(text, Head::kTanhImage);
}

ArchSpec DiscriminatorPreset(std::string_view name) {
  if (name == "patch70") {
    return ArchSpec::Parse("P4-2-64:nonorm, P4-2-128, P4-2-256, P4-1-512", Head::kPatchLogits);
  }
  if (name == "literal94") {
    return ArchSpec::Parse("P4-2-64:nonorm, P4-2-128, P4-2-256, P4-2-512", Head::kPatchLogits);
  }
  if (name == "desk") {
    return ArchSpec::Parse("P4-2-32:nonorm, P4-2-64, P4-1-128", Head::kPatchLogits);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown discriminator preset '" + std::string(name) + "'");
}

ArchSpec FeatureExtractorPreset(std::string_view name) {
  if (name == "default") return ArchSpec::Parse("C7-2-64, R3-64, R3-128, R3-256, R3-512", Head::kNone);
  if (name == "desk") return ArchSpec::Parse("C7-2-16, R3-16, R3-32, R3-64, R3-128", Head::kNone);
  Fail(ErrorCode::kInvalidArgument, "unknown feature extractor preset '" + std::string(name) + "'");
}

namespace {

bool LooksLikeTokenList(std::string_view text) {
  return text.find('-') != std::string_view::npos;
}

}  // namespace

ArchSpec ResolveGeneratorSpec(std::string_view text) {
  return LooksLikeTokenList(text) ? ArchSpec::Parse(text, Head::kTanhImage) : GeneratorPreset(Trim(text));
}

ArchSpec ResolveDiscriminatorSpec(std::string_view text) {
  return LooksLikeTokenList(text) ? ArchSpec::Parse(text, Head::kPatchLogits)
                                  : DiscriminatorPreset(Trim(text));
}

ArchSpec ResolveFeatureExtractorSpec(std::string_view text) {
  return LooksLikeTokenList(text) ? ArchSpec::Parse(text, Head::kNone) : FeatureExtractorPreset(Trim(text));
}

int ReceptiveField(const ArchSpec& spec) {
  int rf = 1;
  int jump = 1;
  auto apply = [&](int kernel, int stride) {
    rf += (kernel - 1) * jump;
    jump *= stride;
  };
  int channels = 3;
  for (const auto& t : spec.tokens) {
    if (t.stride == Stride::kHalf) {
      Fail(ErrorCode::kInvalidArgument, "receptive field undefined for fractional stride token " + t.ToString());
    }
    const int s = t.stride == Stride::kTwo ? 2 : 1;
    if (t.kind == LayerKind::kR) {
      // A channel-changing residual block downsamples in its first conv.
      apply(t.kernel, t.filters != channels ? 2 : 1);
      apply(t.kernel, 1);
    } else {
      apply(t.kernel, s);
    }
    channels = t.filters;
  }
  if (spec.head == Head::kPatchLogits) apply(4, 1);
  return rf;
}

}  // namespace argan
