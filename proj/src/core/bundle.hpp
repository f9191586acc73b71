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

// Single-file tensor container.
//
// Layout (little-endian):
//   "DBXB" | u32 version | u32 manifest_length | manifest | blob
// The manifest is UTF-8 JSON: an array of {"name", "dtype", "shape",
// "offset"} objects, offsets relative to the start of the blob. Entries
// must not overlap and must cover the blob exactly.

#ifndef DISCOBOX_CORE_BUNDLE_HPP_
#define DISCOBOX_CORE_BUNDLE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensors.hpp"

namespace discobox {

inline constexpr char kBundleMagic[4] = {'D', 'B', 'X', 'B'};
inline constexpr std::uint32_t kBundleVersion = 1;

enum class DType { kF32, kU8 };

std::string_view DTypeName(DType dtype);
std::size_t DTypeSize(DType dtype);

struct BundleEntry {
  std::string name;
  DType dtype = DType::kF32;
  std::vector<std::int64_t> shape;
  std::uint64_t offset = 0;

  std::uint64_t element_count() const;
  std::uint64_t byte_size() const { return element_count() * DTypeSize(dtype); }

  bool operator==(const BundleEntry&) const = default;
};

class TensorBundle {
 public:
  TensorBundle() = default;

  // Appends an array at the end of the blob.
  void AddF32(std::string name, std::vector<std::int64_t> shape,
              std::span<const float> values);
  void AddU8(std::string name, std::vector<std::int64_t> shape,
             std::span<const std::uint8_t> values);

  const std::vector<BundleEntry>& entries() const { return entries_; }
  const std::vector<std::uint8_t>& blob() const { return blob_; }
  bool empty() const { return entries_.empty(); }

  const BundleEntry* Find(std::string_view name) const;
  bool Contains(std::string_view name) const { return Find(name) != nullptr; }

  // Typed readers; kMissingEntry when absent. F32 converts u8 entries by
  // value, U8 rejects f32 entries.
  std::vector<float> ReadF32(std::string_view name) const;
  std::vector<std::uint8_t> ReadU8(std::string_view name) const;

  Grid2D ReadGrid(std::string_view name) const;       // shape [H, W]
  RoiFeature ReadTensor(std::string_view name) const; // shape [C, H, W]

  std::vector<std::uint8_t> Serialize() const;
  static TensorBundle Parse(std::span<const std::uint8_t> bytes);

  bool operator==(const TensorBundle&) const = default;

 private:
  void Append(std::string name, DType dtype, std::vector<std::int64_t> shape,
              const std::uint8_t* data, std::size_t bytes);

  std::vector<BundleEntry> entries_;
  std::vector<std::uint8_t> blob_;
};

TensorBundle ReadBundle(const std::filesystem::path& path);
void WriteBundle(const TensorBundle& bundle, const std::filesystem::path& path);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace discobox

#endif  // DISCOBOX_CORE_BUNDLE_HPP_
