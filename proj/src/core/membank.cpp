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

#include "core/membank.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>

#include "core/bundle.hpp"
#include "core/error.hpp"
#include "json.hpp"

namespace discobox::membank {
namespace {

using json = nlohmann::json;

constexpr int kSnapshotSchema = 1;

std::string CategoryFile(int category) {
  return "category_" + std::to_string(category) + ".dbxb";
}

}  // namespace

MemoryBank::MemoryBank(const MemoryBank& other) {
  std::shared_lock lock(other.mutex_);
  queues_ = other.queues_;
  next_sequence_ = other.next_sequence_;
}

MemoryBank& MemoryBank::operator=(const MemoryBank& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_);
  std::shared_lock other_lock(other.mutex_);
  queues_ = other.queues_;
  next_sequence_ = other.next_sequence_;
  return *this;
}

void MemoryBank::PushEntry(EntryPtr entry) {
  std::deque<EntryPtr>& queue = queues_[entry->category];
  if (static_cast<int>(queue.size()) >= kQueueCapacity) queue.pop_front();
  queue.push_back(std::move(entry));
}

bool MemoryBank::Push(const RoiObject& object) {
  if (object.area < kMinPushArea) return false;
  auto entry = std::make_shared<Entry>();
  entry->id = object.id;
  entry->category = object.category;
  entry->feature = object.feature;
  entry->mask = object.mask;
  entry->confidence = object.confidence;
  entry->area = object.area;
  std::scoped_lock lock(mutex_);
  entry->sequence = next_sequence_++;
  PushEntry(std::move(entry));
  return true;
}

std::vector<EntryPtr> MemoryBank::Retrieve(int category, std::uint64_t seed) const {
  std::shared_lock lock(mutex_);
  const auto it = queues_.find(category);
  if (it == queues_.end()) return {};
  const std::deque<EntryPtr>& queue = it->second;
  const int n = static_cast<int>(queue.size());
  if (n < kMinBankSize) return {};
  const int take = std::min(kMaxRetrieved, n);

  // Partial Fisher-Yates over queue positions.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<EntryPtr> out;
  out.reserve(take);
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
    out.push_back(queue[order[i]]);
  }
  return out;
}

int MemoryBank::Size(int category) const {
  std::shared_lock lock(mutex_);
  const auto it = queues_.find(category);
  return it == queues_.end() ? 0 : static_cast<int>(it->second.size());
}

std::vector<int> MemoryBank::Categories() const {
  std::shared_lock lock(mutex_);
  std::vector<int> out;
  for (const auto& [category, queue] : queues_) {
    if (!queue.empty()) out.push_back(category);
  }
  return out;
}

std::vector<EntryPtr> MemoryBank::Snapshot(int category) const {
  std::shared_lock lock(mutex_);
  const auto it = queues_.find(category);
  if (it == queues_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

void MemoryBank::Save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIoFailure, "cannot create bank directory " + dir.string());

  json manifest = {{"schema_version", kSnapshotSchema},
                   {"capacity", kQueueCapacity},
                   {"categories", json::array()}};
  for (int category : Categories()) {
    const std::vector<EntryPtr> entries = Snapshot(category);
    TensorBundle bundle;
    json listed = json::array();
    for (std::size_t n = 0; n < entries.size(); ++n) {
      const Entry& e = *entries[n];
      const RoiFeature& f = e.feature;
      bundle.AddF32("feat/" + std::to_string(n), {f.channels(), f.height(), f.width()}, f.values());
      bundle.AddF32("mask/" + std::to_string(n), {e.mask.height(), e.mask.width()},
                    e.mask.grid().values());
      listed.push_back({{"id", e.id}, {"confidence", e.confidence}, {"area", e.area}});
    }
    WriteBundle(bundle, dir / CategoryFile(category));
    manifest["categories"].push_back(
        {{"category", category}, {"file", CategoryFile(category)}, {"entries", listed}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoFailure, "cannot write bank manifest");
  out << manifest.dump(2) << "\n";
}

MemoryBank MemoryBank::Load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open bank manifest in " + dir.string());
  MemoryBank bank;
  try {
    const json manifest = json::parse(in);
    if (manifest.at("schema_version").get<int>() != kSnapshotSchema) {
      Fail(ErrorCode::kUnsupportedVersion, "bank snapshot schema");
    }
    for (const json& cat : manifest.at("categories")) {
      const int category = cat.at("category").get<int>();
      const TensorBundle bundle = ReadBundle(dir / cat.at("file").get<std::string>());
      const json& entries = cat.at("entries");
      for (std::size_t n = 0; n < entries.size(); ++n) {
        auto entry = std::make_shared<Entry>();
        entry->id = entries[n].at("id").get<std::string>();
        entry->category = category;
        entry->confidence = entries[n].at("confidence").get<double>();
        entry->area = entries[n].at("area").get<double>();
        entry->feature = bundle.ReadTensor("feat/" + std::to_string(n));
        entry->mask = MaskProb(bundle.ReadGrid("mask/" + std::to_string(n)));
        entry->sequence = bank.next_sequence_++;
        bank.PushEntry(std::move(entry));
      }
    }
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kParseError, std::string("bank manifest: ") + ex.what());
  }
  return bank;
}

}  // namespace discobox::membank
