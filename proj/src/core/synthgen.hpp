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

// Seeded synthetic fixtures for tests, benches and the acceptance suite.

#ifndef DISCOBOX_CORE_SYNTHGEN_HPP_
#define DISCOBOX_CORE_SYNTHGEN_HPP_

#include <cstdint>
#include <vector>

#include "core/corrmetric.hpp"
#include "core/tensors.hpp"

namespace discobox::synth {

inline constexpr int kShapeFeatureChannels = 4;
inline constexpr int kPairFeatureChannels = 16;

struct ShapeRoi {
  RoiObject object;
  Labeling truth;
};

// Filled ellipse on a two-color background with per-pixel Gaussian color
// noise. The mask is the truth with each pixel flipped at noise_rate.
// Errors: kOutOfRange unless 0 <= noise_rate < 1, kInvalidArgument for
// size < 1.
ShapeRoi GenShapeRoi(std::uint64_t seed, int size, double noise_rate);

struct PermutedPair {
  RoiObject a;
  RoiObject b;
  // b's feature at permutation[i] equals a's feature at i.
  std::vector<int> permutation;
};

// a carries random unit features; b holds the same vectors at uniformly
// shuffled pixel positions. Both masks are all foreground.
PermutedPair GenPermutedPair(std::uint64_t seed, int size, bool identity = false);

struct MetricFixture {
  std::vector<metric::AnnotatedImage> images;
  std::vector<metric::CorrespondencePrediction> predictions;
};

// n_pairs image pairs of one same-category object each. Predictions sit on
// the visible ground-truth keypoints with Gaussian noise of noise_px.
MetricFixture GenMetricFixture(std::uint64_t seed, int n_pairs, double noise_px);

}  // namespace discobox::synth

#endif  // DISCOBOX_CORE_SYNTHGEN_HPP_
