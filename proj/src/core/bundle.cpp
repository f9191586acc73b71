// Copyright 2026 The DiscoBox Engine Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <utility>

#include "core/error.hpp"
#include "json.hpp"

namespace discobox {

static_assert(std::endian::native == std::endian::little,
              "bundle I/O assumes a little-endian host");

namespace {

using json = nlohmann::json;

std::string Quote(std::string_view name) { return "'" + std::string(name) + "'"; }

std::uint32_t LoadU32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

void StoreU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t b[4];
  std::memcpy(b, &v, sizeof(v));
  out.insert(out.end(), b, b + 4);
}

DType ParseDType(const std::string& s, const std::string& name) {
  if (s == "f32") return DType::kF32;
  if (s == "u8") return DType::kU8;
  Fail(ErrorCode::kBadManifest, "entry " + Quote(name) + " has unknown dtype " + s);
}

}  // namespace

std::string_view DTypeName(DType dtype) {
  return dtype == DType::kF32 ? "f32" : "u8";
}

std::size_t DTypeSize(DType dtype) { return dtype == DType::kF32 ? 4 : 1; }

std::uint64_t BundleEntry::element_count() const {
  std::uint64_t n = 1;
  for (std::int64_t d : shape) n *= static_cast<std::uint64_t>(d);
  return n;
}

void TensorBundle::Append(std::string name, DType dtype,
                          std::vector<std::int64_t> shape,
                          const std::uint8_t* data, std::size_t bytes) {
  if (Contains(name)) {
    Fail(ErrorCode::kInvalidArgument, "duplicate bundle entry " + Quote(name));
  }
  BundleEntry entry{std::move(name), dtype, std::move(shape), blob_.size()};
  for (std::int64_t d : entry.shape) {
    if (d < 0) Fail(ErrorCode::kInvalidArgument, "negative dimension in " + Quote(entry.name));
  }
  if (entry.byte_size() != bytes) {
    Fail(ErrorCode::kDimMismatch, "shape of " + Quote(entry.name) +
                                      " does not match the data length");
  }
  blob_.insert(blob_.end(), data, data + bytes);
  entries_.push_back(std::move(entry));
}

void TensorBundle::AddF32(std::string name, std::vector<std::int64_t> shape,
                          std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      Fail(ErrorCode::kNonFiniteValue, "non-finite value in " + Quote(name));
    }
  }
  Append(std::move(name), DType::kF32, std::move(shape),
         reinterpret_cast<const std::uint8_t*>(values.data()),
         values.size() * sizeof(float));
}

void TensorBundle::AddU8(std::string name, std::vector<std::int64_t> shape,
                         std::span<const std::uint8_t> values) {
  Append(std::move(name), DType::kU8, std::move(shape), values.data(),
         values.size());
}

const BundleEntry* TensorBundle::Find(std::string_view name) const {
  for (const BundleEntry& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<float> TensorBundle::ReadF32(std::string_view name) const {
  const BundleEntry* e = Find(name);
  if (e == nullptr) Fail(ErrorCode::kMissingEntry, "no entry " + Quote(name));
  const std::size_t n = e->element_count();
  std::vector<float> out(n);
  const std::uint8_t* src = blob_.data() + e->offset;
  if (e->dtype == DType::kF32) {
    std::memcpy(out.data(), src, n * sizeof(float));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(src[i]);
  }
  return out;
}

std::vector<std::uint8_t> TensorBundle::ReadU8(std::string_view name) const {
  const BundleEntry* e = Find(name);
  if (e == nullptr) Fail(ErrorCode::kMissingEntry, "no entry " + Quote(name));
  if (e->dtype != DType::kU8) {
    Fail(ErrorCode::kDimMismatch, "entry " + Quote(name) + " is not u8");
  }
  const auto first = blob_.begin() + static_cast<std::ptrdiff_t>(e->offset);
  return std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(e->byte_size()));
}

Grid2D TensorBundle::ReadGrid(std::string_view name) const {
  const BundleEntry* e = Find(name);
  if (e == nullptr) Fail(ErrorCode::kMissingEntry, "no entry " + Quote(name));
  if (e->shape.size() != 2) {
    Fail(ErrorCode::kDimMismatch, "entry " + Quote(name) + " must have shape [H, W]");
  }
  return Grid2D(static_cast<int>(e->shape[0]), static_cast<int>(e->shape[1]),
                ReadF32(name));
}

RoiFeature TensorBundle::ReadTensor(std::string_view name) const {
  const BundleEntry* e = Find(name);
  if (e == nullptr) Fail(ErrorCode::kMissingEntry, "no entry " + Quote(name));
  if (e->shape.size() != 3) {
    Fail(ErrorCode::kDimMismatch, "entry " + Quote(name) + " must have shape [C, H, W]");
  }
  return RoiFeature(static_cast<int>(e->shape[0]), static_cast<int>(e->shape[1]),
                    static_cast<int>(e->shape[2]), ReadF32(name));
}

std::vector<std::uint8_t> TensorBundle::Serialize() const {
  json manifest = json::array();
  for (const BundleEntry& e : entries_) {
    manifest.push_back({{"name", e.name},
                        {"dtype", std::string(DTypeName(e.dtype))},
                        {"shape", e.shape},
                        {"offset", e.offset}});
  }
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out;
  out.reserve(12 + text.size() + blob_.size());
  out.insert(out.end(), kBundleMagic, kBundleMagic + 4);
  StoreU32(out, kBundleVersion);
  StoreU32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), blob_.begin(), blob_.end());
  return out;
}

TensorBundle TensorBundle::Parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kBundleMagic, 4) != 0) {
    Fail(ErrorCode::kBadMagic, "missing DBXB header");
  }
  const std::uint32_t version = LoadU32(bytes.data() + 4);
  if (version != kBundleVersion) {
    Fail(ErrorCode::kUnsupportedVersion,
         "bundle version " + std::to_string(version));
  }
  const std::uint32_t manifest_len = LoadU32(bytes.data() + 8);
  if (bytes.size() - 12 < manifest_len) {
    Fail(ErrorCode::kTruncatedBlob, "manifest extends past end of file");
  }
  const std::string text(reinterpret_cast<const char*>(bytes.data() + 12),
                         manifest_len);
  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kBadManifest, ex.what());
  }
  if (!manifest.is_array()) Fail(ErrorCode::kBadManifest, "manifest is not an array");

  TensorBundle bundle;
  const std::span<const std::uint8_t> blob = bytes.subspan(12 + manifest_len);
  bundle.blob_.assign(blob.begin(), blob.end());

  for (const json& item : manifest) {
    BundleEntry e;
    try {
      e.name = item.at("name").get<std::string>();
      e.dtype = ParseDType(item.at("dtype").get<std::string>(), e.name);
      e.shape = item.at("shape").get<std::vector<std::int64_t>>();
      e.offset = item.at("offset").get<std::uint64_t>();
    } catch (const json::exception& ex) {
      Fail(ErrorCode::kBadManifest, ex.what());
    }
    for (std::int64_t d : e.shape) {
      if (d < 0) Fail(ErrorCode::kBadManifest, "negative dimension in " + Quote(e.name));
    }
    if (bundle.Contains(e.name)) {
      Fail(ErrorCode::kBadManifest, "duplicate entry " + Quote(e.name));
    }
    if (e.offset > blob.size() || e.byte_size() > blob.size() - e.offset) {
      Fail(ErrorCode::kTruncatedBlob, "entry " + Quote(e.name) +
                                          " extends past end of blob");
    }
    bundle.entries_.push_back(std::move(e));
  }

  std::vector<const BundleEntry*> order;
  for (const BundleEntry& e : bundle.entries_) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const BundleEntry* a, const BundleEntry* b) { return a->offset < b->offset; });
  std::uint64_t covered = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) {
      const BundleEntry* prev = order[i - 1];
      if (order[i]->byte_size() > 0 && prev->offset + prev->byte_size() > order[i]->offset) {
        Fail(ErrorCode::kOverlappingEntries,
             "entries " + Quote(prev->name) + " and " + Quote(order[i]->name) + " overlap");
      }
    }
    covered += order[i]->byte_size();
  }
  if (covered != blob.size()) {
    Fail(ErrorCode::kBadManifest,
         "blob holds " + std::to_string(blob.size() - covered) + " unreferenced bytes");
  }

  for (const BundleEntry& e : bundle.entries_) {
    if (e.dtype != DType::kF32) continue;
    const std::uint8_t* p = bundle.blob_.data() + e.offset;
    for (std::uint64_t i = 0; i < e.element_count(); ++i) {
      float v;
      std::memcpy(&v, p + i * 4, 4);
      if (!std::isfinite(v)) {
        Fail(ErrorCode::kNonFiniteValue, "non-finite value in " + Quote(e.name));
      }
    }
  }
  return bundle;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIoFailure, "short write to " + path.string());
}

TensorBundle ReadBundle(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  return TensorBundle::Parse(bytes);
}

void WriteBundle(const TensorBundle& bundle, const std::filesystem::path& path) {
  WriteFileBytes(path, bundle.Serialize());
}

}  // namespace discobox
