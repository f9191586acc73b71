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

#ifndef DISCOBOX_CORE_MEMBANK_HPP_
#define DISCOBOX_CORE_MEMBANK_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "core/tensors.hpp"

namespace discobox::membank {

inline constexpr int kQueueCapacity = 100;
inline constexpr double kMinPushArea = 32.0 * 32.0;
inline constexpr int kMaxRetrieved = 10;
inline constexpr int kMinBankSize = 5;

struct Entry {
  std::string id;
  int category = 0;
  RoiFeature feature;
  MaskProb mask;
  double confidence = 1.0;
  double area = 0.0;
  std::uint64_t sequence = 0;  // global insertion counter
};

using EntryPtr = std::shared_ptr<const Entry>;

// Per-category FIFO queues. Pushes take an exclusive lock, retrievals a
// shared one; returned entries are immutable and outlive eviction.
class MemoryBank {
 public:
  MemoryBank() = default;
  MemoryBank(const MemoryBank& other);
  MemoryBank& operator=(const MemoryBank& other);

  // Rejected iff area < 32 x 32. Evicts the oldest entry at capacity.
  bool Push(const RoiObject& object);

  // Empty when the category holds fewer than 5 entries; otherwise
  // min(10, size) distinct entries sampled uniformly with the seed.
  std::vector<EntryPtr> Retrieve(int category, std::uint64_t seed) const;

  int Size(int category) const;
  std::vector<int> Categories() const;
  // Queue contents oldest first.
  std::vector<EntryPtr> Snapshot(int category) const;

  // Directory with manifest.json and one bundle per category.
  void Save(const std::filesystem::path& dir) const;
  static MemoryBank Load(const std::filesystem::path& dir);

 private:
  void PushEntry(EntryPtr entry);

  mutable std::shared_mutex mutex_;
  std::map<int, std::deque<EntryPtr>> queues_;
  std::uint64_t next_sequence_ = 0;
};

}  // namespace discobox::membank

#endif  // DISCOBOX_CORE_MEMBANK_HPP_
