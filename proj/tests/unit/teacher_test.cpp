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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "core/crf.hpp"
#include "core/membank.hpp"
#include "core/synthgen.hpp"
#include "core/teacher.hpp"
#include "support/expect_error.hpp"
#include "support/oracles.hpp"

namespace discobox::teacher {
namespace {

RunConfig SmallConfig() {
  RunConfig cfg;
  cfg.roi_size = 16;
  return cfg;
}

TEST(ConsistencyLossTest, HandValues) {
  const Labeling ones = Labeling::FromBits(2, 2, {1, 1, 1, 1});
  EXPECT_NEAR(ConsistencyLoss(ones, MaskProb(Grid2D::Filled(2, 2, 0.9f))), 0.10536, 1e-5);
  const MaskProb m(Grid2D(1, 2, {1e-7f, 1.0f - 1e-7f}));
  EXPECT_NEAR(ConsistencyLoss(Labeling::Threshold(m), m), 0.0, 1e-6);
}

TEST(ConsistencyLossTest, MatchesNaive) {
  for (int seed = 0; seed < 20; ++seed) {
    oracle::Gen gen(seed);
    const MaskProb m = gen.Mask(3, 3);
    const Labeling x = gen.Labels(3, 3);
    double naive = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double p = std::clamp<double>(m[i], 1e-7, 1 - 1e-7);
      naive -= x[i] ? std::log(p) : std::log(1 - p);
    }
    EXPECT_NEAR(ConsistencyLoss(x, m), naive / 9, 1e-9);
  }
  EXPECT_DBX_ERROR(ConsistencyLoss(Labeling::FromBits(1, 1, {1}), MaskProb(Grid2D::Filled(1, 2, 0.5f))),
                   ErrorCode::kDimMismatch);
}

TEST(NceLossTest, SingleCandidateIsZero) {
  CostVolume c;
  c.rows = c.cols = 1;
  c.values = {0.4};
  ot::TransportPlan p;
  p.rows = p.cols = 1;
  p.values = {1.0};
  EXPECT_NEAR(NceLoss(c, p, 0.07), 0.0, 1e-12);
}

TEST(NceLossTest, TwoEqualCandidates) {
  CostVolume c;
  c.rows = 1;
  c.cols = 2;
  c.values = {0.3, 0.3};
  ot::TransportPlan p;
  p.rows = 1;
  p.cols = 2;
  p.values = {0.1, 0.9};
  EXPECT_NEAR(NceLoss(c, p, 0.07), std::log(2.0), 1e-12);
}

TEST(NceLossTest, MatchesNaiveSoftmax) {
  for (int seed = 0; seed < 20; ++seed) {
    oracle::Gen gen(40 + seed);
    const CostVolume c = gen.Cost(4, 4, -1, 1);
    const ot::TransportPlan p = gen.Plan(4, 4);
    const double tau = gen.Uniform(0.05, 1.0);
    const std::vector<int> t = ot::RowArgmax(p);
    double naive = 0.0;
    for (int i = 0; i < 4; ++i) {
      double z = 0.0;
      for (int k = 0; k < 4; ++k) z += std::exp(c.at(i, k) / tau);
      naive -= std::log(std::exp(c.at(i, t[i]) / tau) / z);
    }
    EXPECT_NEAR(NceLoss(c, p, tau), naive / 4, 1e-6);
    const Labeling none = Labeling::FromBits(1, 4, {0, 0, 0, 0});
    EXPECT_EQ(NceLoss(c, p, tau, &none), 0.0);
  }
}

TEST(TotalLossTest, Weights) {
  EXPECT_NEAR(TotalLoss(1, 1, 1, LossWeights{}), 12.1, 1e-12);
  EXPECT_NEAR(TotalLoss(1, 1, 1, kSoloLossWeights), 2.1, 1e-12);
  EXPECT_EQ(TotalLoss(0, 0, 0, LossWeights{}), 0.0);
}

TEST(EmaUpdateTest, Momentum) {
  const ParamVector t{{1.0}, 4};
  const ParamVector s{{0.0}, 0};
  const ParamVector out = EmaUpdate(t, s);
  EXPECT_NEAR(out.values[0], 0.999, 1e-15);
  EXPECT_EQ(out.version, 5u);
  EXPECT_EQ(EmaUpdate(t, s, 1.0).values, t.values);
  EXPECT_EQ(EmaUpdate(t, s, 0.0).values, s.values);
  EXPECT_DBX_ERROR(EmaUpdate(t, ParamVector{{1.0, 2.0}, 0}), ErrorCode::kLengthMismatch);
  EXPECT_DBX_ERROR(EmaUpdate(t, s, 1.5), ErrorCode::kOutOfRange);
}

TEST(TightPixelBoxTest, SnapsOutwards) {
  RoiObject o = synth::GenShapeRoi(1, 8, 0.0).object;
  o.tight_box = Box{1.2, 0.5, 6.1, 7.9};
  EXPECT_EQ(TightPixelBox(o), (mil::PixelBox{1, 0, 7, 8}));
  o.tight_box.reset();
  EXPECT_EQ(TightPixelBox(o), (mil::PixelBox{0, 0, 8, 8}));
}

TEST(RefineBatchTest, EmptyBankIsIntraImageOnly) {
  membank::MemoryBank bank;
  const RunConfig cfg = SmallConfig();
  const synth::ShapeRoi s = synth::GenShapeRoi(3, 16, 0.1);
  const auto out = RefineBatch({s.object}, bank, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].neighbor_ids.empty());
  const crf::MeanFieldResult direct = crf::MeanField(
      s.object.mask, crf::BuildKernel(s.object.rgb, cfg.teacher.w1, cfg.teacher.zeta), {}, cfg.teacher);
  EXPECT_EQ(out[0].pseudo_label, direct.labeling);
  EXPECT_EQ(out[0].losses.nce, 0.0);
  EXPECT_EQ(bank.Size(1), 1);
}

TEST(RefineBatchTest, CleanNeighboursPullTowardsTruth) {
  // Same image in the bank with its true mask; the query carries heavy mask noise.
  const RunConfig cfg = SmallConfig();
  std::vector<double> alone, linked;
  for (int seed = 0; seed < 15; ++seed) {
    const synth::ShapeRoi s = synth::GenShapeRoi(seed, 16, 0.3);
    membank::MemoryBank empty;
    alone.push_back(IntersectionOverUnion(RefineBatch({s.object}, empty, cfg)[0].pseudo_label, s.truth));
    membank::MemoryBank bank;
    for (int c = 0; c < 5; ++c) {
      RoiObject copy = s.object;
      copy.id = "copy" + std::to_string(c);
      copy.mask = MaskProb(s.truth.grid());
      bank.Push(copy);
    }
    const auto out = RefineBatch({s.object}, bank, cfg);
    EXPECT_EQ(out[0].neighbor_ids.size(), 5u);
    linked.push_back(IntersectionOverUnion(out[0].pseudo_label, s.truth));
  }
  std::nth_element(alone.begin(), alone.begin() + 7, alone.end());
  std::nth_element(linked.begin(), linked.begin() + 7, linked.end());
  EXPECT_GT(linked[7], alone[7]);
  EXPECT_GE(linked[7], 0.95);
}

TEST(RefineBatchTest, CategoriesDoNotMix) {
  membank::MemoryBank bank;
  for (int c = 0; c < 6; ++c) {
    RoiObject o = synth::GenShapeRoi(100 + c, 16, 0.0).object;
    o.id = "cat2_" + std::to_string(c);
    o.category = 2;
    bank.Push(o);
  }
  RoiObject a = synth::GenShapeRoi(1, 16, 0.1).object;
  RoiObject b = synth::GenShapeRoi(2, 16, 0.1).object;
  b.category = 3;
  const auto out = RefineBatch({a, b}, bank, SmallConfig());
  EXPECT_TRUE(out[0].neighbor_ids.empty());
  EXPECT_TRUE(out[1].neighbor_ids.empty());
  EXPECT_EQ(bank.Size(1), 1);
  EXPECT_EQ(bank.Size(3), 1);
}

TEST(RefineBatchTest, ThreadCountDoesNotChangeResults) {
  membank::MemoryBank seed_bank;
  for (int c = 0; c < 6; ++c) {
    RoiObject o = synth::GenShapeRoi(200 + c, 16, 0.05).object;
    o.id = "bank" + std::to_string(c);
    seed_bank.Push(o);
  }
  std::vector<RoiObject> objects;
  for (int i = 0; i < 5; ++i) objects.push_back(synth::GenShapeRoi(i, 20, 0.1).object);
  RunConfig one = SmallConfig();
  RunConfig four = one;
  four.threads = 4;
  membank::MemoryBank b1 = seed_bank, b4 = seed_bank;
  const auto r1 = RefineBatch(objects, b1, one);
  const auto r4 = RefineBatch(objects, b4, four);
  ASSERT_EQ(r1.size(), r4.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].id, r4[i].id);
    EXPECT_EQ(r1[i].pseudo_label, r4[i].pseudo_label);
    EXPECT_EQ(r1[i].neighbor_ids, r4[i].neighbor_ids);
    EXPECT_EQ(r1[i].losses.total, r4[i].losses.total);
  }
}

TEST(RefineBatchTest, BadObjectIsNamed) {
  membank::MemoryBank bank;
  RoiObject o = synth::GenShapeRoi(1, 8, 0.0).object;
  o.id = "broken";
  o.box = Box{5, 5, 5, 9};
  try {
    RefineBatch({o}, bank, SmallConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(RetrievalSeedTest, DistinctPerIndex) {
  EXPECT_NE(RetrievalSeed(0, 0), RetrievalSeed(0, 1));
  EXPECT_EQ(RetrievalSeed(5, 3), RetrievalSeed(5, 3));
}

}  // namespace
}  // namespace discobox::teacher
