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

#include <filesystem>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "core/membank.hpp"
#include "core/synthgen.hpp"
#include "support/expect_error.hpp"

namespace discobox::membank {
namespace {

namespace fs = std::filesystem;

RoiObject Object(const std::string& id, int category, double area) {
  RoiObject o = synth::GenShapeRoi(id.size(), 4, 0.0).object;
  o.id = id;
  o.category = category;
  o.area = area;
  return o;
}

MemoryBank Filled(int category, int count) {
  MemoryBank bank;
  for (int i = 0; i < count; ++i) bank.Push(Object("o" + std::to_string(i), category, 4096));
  return bank;
}

TEST(MemoryBankTest, AreaThreshold) {
  MemoryBank bank;
  EXPECT_FALSE(bank.Push(Object("small", 1, 961)));
  EXPECT_TRUE(bank.Push(Object("edge", 1, 1024)));
  EXPECT_EQ(bank.Size(1), 1);
}

TEST(MemoryBankTest, FifoEviction) {
  MemoryBank bank;
  for (int i = 1; i <= 101; ++i) bank.Push(Object("e" + std::to_string(i), 4, 2000));
  const auto snap = bank.Snapshot(4);
  ASSERT_EQ(snap.size(), 100u);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(snap[i]->id, "e" + std::to_string(i + 2));
}

TEST(MemoryBankTest, RetrievalSizes) {
  EXPECT_TRUE(Filled(1, 4).Retrieve(1, 0).empty());
  EXPECT_EQ(Filled(1, 5).Retrieve(1, 0).size(), 5u);
  EXPECT_EQ(Filled(1, 7).Retrieve(1, 0).size(), 7u);
  EXPECT_EQ(Filled(1, 50).Retrieve(1, 0).size(), 10u);
  EXPECT_TRUE(Filled(1, 50).Retrieve(2, 0).empty());
}

TEST(MemoryBankTest, SeededRetrievalIsRepeatableAndDistinct) {
  const MemoryBank bank = Filled(1, 50);
  const auto a = bank.Retrieve(1, 42);
  const auto b = bank.Retrieve(1, 42);
  ASSERT_EQ(a.size(), 10u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->id, b[i]->id);
    ids.insert(a[i]->id);
  }
  EXPECT_EQ(ids.size(), 10u);
  bool differs = false;
  for (std::uint64_t s = 0; s < 5 && !differs; ++s) {
    const auto c = bank.Retrieve(1, s);
    for (std::size_t i = 0; i < c.size(); ++i) differs |= c[i]->id != a[i]->id;
  }
  EXPECT_TRUE(differs);
}

TEST(MemoryBankTest, SnapshotRoundTrip) {
  MemoryBank bank = Filled(1, 6);
  bank.Push(Object("other", 9, 5000));
  const fs::path dir = fs::temp_directory_path() / "discobox_bank_roundtrip";
  fs::remove_all(dir);
  bank.Save(dir);
  const MemoryBank back = MemoryBank::Load(dir);
  EXPECT_EQ(back.Categories(), bank.Categories());
  for (int cat : bank.Categories()) {
    const auto x = bank.Snapshot(cat), y = back.Snapshot(cat);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x[i]->id, y[i]->id);
      EXPECT_EQ(x[i]->feature, y[i]->feature);
      EXPECT_EQ(x[i]->mask, y[i]->mask);
      EXPECT_EQ(x[i]->area, y[i]->area);
    }
  }
  EXPECT_EQ(back.Retrieve(1, 3).front()->id, bank.Retrieve(1, 3).front()->id);
  fs::remove_all(dir);
}

TEST(MemoryBankTest, LoadErrors) {
  EXPECT_DBX_ERROR(MemoryBank::Load("/nonexistent/bank"), ErrorCode::kIoFailure);
}

TEST(MemoryBankTest, ConcurrentReadersAndWriter) {
  MemoryBank bank = Filled(1, 20);
  std::vector<std::jthread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&bank, t] {
      for (int i = 0; i < 200; ++i) {
        const auto got = bank.Retrieve(1, t * 1000 + i);
        ASSERT_EQ(got.size(), 10u);
      }
    });
  }
  for (int i = 0; i < 200; ++i) bank.Push(Object("w" + std::to_string(i), 1, 4096));
  readers.clear();
  EXPECT_EQ(bank.Size(1), 100);
}

}  // namespace
}  // namespace discobox::membank
