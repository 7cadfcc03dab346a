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
#include "networks/archive.hpp"

#include <cstring>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace argan {

namespace {

enum class DtypeTag : std::uint8_t { kF32 = 0, kF64 = 1, kI64 = 2, kU8 = 3 };

DtypeTag TagOf(torch::Dtype d) {
  switch (d) {
    case torch::kFloat32: return DtypeTag::kF32;
    case torch::kFloat64: return DtypeTag::kF64;
    case torch::kInt64: return DtypeTag::kI64;
    case torch::kUInt8: return DtypeTag::kU8;
    default: Fail(ErrorCode::kInvalidArgument, "unsupported tensor dtype for archive");
  }
}

torch::Dtype DtypeOf(std::uint8_t tag) {
  switch (static_cast<DtypeTag>(tag)) {
    case DtypeTag::kF32: return torch::kFloat32;
    case DtypeTag::kF64: return torch::kFloat64;
    case DtypeTag::kI64: return torch::kInt64;
    case DtypeTag::kU8: return torch::kUInt8;
  }
  Fail(ErrorCode::kParse, "corrupt archive: unknown dtype tag");
}

template <typename T>
void Put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

void PutString(std::string& out, std::string_view s) {
  Put<std::uint64_t>(out, s.size());
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view Raw(size_t n) {
    Need(n);
    auto view = bytes_.substr(pos_, n);
    pos_ += n;
    return view;
  }

  std::string GetString() { return std::string(Raw(Get<std::uint64_t>())); }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) Fail(ErrorCode::kParse, "corrupt archive: truncated");
  }
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

void Archive::PutText(std::string name, std::string value) {
  for (auto& [k, v] : texts_) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  texts_.emplace_back(std::move(name), std::move(value));
}

void Archive::PutTensor(std::string name, const torch::Tensor& value) {
  auto copy = value.detach().cpu().contiguous().clone();
  for (auto& [k, v] : tensors_) {
    if (k == name) {
      v = copy;
      return;
    }
  }
  tensors_.emplace_back(std::move(name), copy);
}

bool Archive::HasText(std::string_view name) const {
  for (const auto& [k, v] : texts_) {
    if (k == name) return true;
  }
  return false;
}

bool Archive::HasTensor(std::string_view name) const {
  for (const auto& [k, v] : tensors_) {
    if (k == name) return true;
  }
  return false;
}

const std::string& Archive::Text(std::string_view name) const {
  for (const auto& [k, v] : texts_) {
    if (k == name) return v;
  }
  Fail(ErrorCode::kParse, "archive has no text entry '" + std::string(name) + "'");
}

const torch::Tensor& Archive::Tensor(std::string_view name) const {
  for (const auto& [k, v] : tensors_) {
    if (k == name) return v;
  }
  Fail(ErrorCode::kParse, "archive has no array '" + std::string(name) + "'");
}

std::string Archive::Serialize() const {
  std::string out;
  out.append(kMagic);
  Put<std::uint32_t>(out, kVersion);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(texts_.size()));
  for (const auto& [k, v] : texts_) {
    PutString(out, k);
    PutString(out, v);
  }
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& [k, t] : tensors_) {
    PutString(out, k);
    Put<std::uint8_t>(out, static_cast<std::uint8_t>(TagOf(t.scalar_type())));
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dim()));
    for (auto d : t.sizes()) Put<std::int64_t>(out, d);
    out.append(static_cast<const char*>(t.data_ptr()), static_cast<size_t>(t.numel()) * t.element_size());
  }
  return out;
}

Archive Archive::Deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (in.Raw(kMagic.size()) != kMagic) Fail(ErrorCode::kParse, "not an argan archive (bad magic)");
  const auto version = in.Get<std::uint32_t>();
  if (version != kVersion) {
    Fail(ErrorCode::kParse, "unsupported archive version " + std::to_string(version));
  }
  Archive a;
  const auto n_text = in.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_text; ++i) {
    std::string k = in.GetString();
    a.texts_.emplace_back(std::move(k), in.GetString());
  }
  const auto n_arr = in.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_arr; ++i) {
    std::string k = in.GetString();
    const torch::Dtype dtype = DtypeOf(in.Get<std::uint8_t>());
    const auto ndim = in.Get<std::uint32_t>();
    std::vector<int64_t> dims(ndim);
    for (auto& d : dims) d = in.Get<std::int64_t>();
    auto t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    auto raw = in.Raw(static_cast<size_t>(t.numel()) * t.element_size());
    std::memcpy(t.data_ptr(), raw.data(), raw.size());
    a.tensors_.emplace_back(std::move(k), t);
  }
  if (!in.AtEnd()) Fail(ErrorCode::kParse, "corrupt archive: trailing bytes");
  return a;
}

void Archive::Save(const std::filesystem::path& path) const { WriteTextFile(path, Serialize()); }

Archive Archive::Load(const std::filesystem::path& path) { return Deserialize(ReadTextFile(path)); }

void PutParameters(Archive& archive, const std::string& prefix, const ParameterStore& params) {
  for (const auto& e : params.entries()) archive.PutTensor(prefix + e.name, e.value);
}

void GetParameters(const Archive& archive, const std::string& prefix, ParameterStore& params) {
  torch::NoGradGuard no_grad;
  for (auto& e : params.entries()) {
    const auto& src = archive.Tensor(prefix + e.name);
    Require(src.sizes() == e.value.sizes(), "shape mismatch for parameter '" + prefix + e.name + "'",
            ErrorCode::kParse);
    e.value.copy_(src);
  }
}

void PutNetwork(Archive& archive, const std::string& role, const Network& net) {
  archive.PutText(role + "kind", std::string(ToString(net.kind())));
  archive.PutText(role + "spec", net.spec().ToString());
  PutParameters(archive, role, net.params());
}

Network GetNetwork(const Archive& archive, const std::string& role) {
  const NetworkKind kind = ParseNetworkKind(archive.Text(role + "kind"));
  const Head head = kind == NetworkKind::kGenerator       ? Head::kTanhImage
                    : kind == NetworkKind::kDiscriminator ? Head::kPatchLogits
                                                          : Head::kNone;
  Network net(kind, ArchSpec::Parse(archive.Text(role + "spec"), head));
  GetParameters(archive, role, net.params());
  return net;
}

void SaveNetwork(const Network& net, const std::filesystem::path& path) {
  Archive a;
  a.PutText("format", "argan-network");
  PutNetwork(a, "", net);
  a.Save(path);
}

Network LoadNetwork(const std::filesystem::path& path, const std::string& role) {
  return GetNetwork(Archive::Load(path), role);
}

}  // namespace argan
