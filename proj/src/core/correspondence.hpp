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

#ifndef DISCOBOX_CORE_CORRESPONDENCE_HPP_
#define DISCOBOX_CORE_CORRESPONDENCE_HPP_

#include <vector>

#include "core/tensors.hpp"
#include "core/transport.hpp"

namespace discobox::corr {

// Integer offset of a target pixel relative to a source pixel.
struct Displacement {
  int dx = 0;
  int dy = 0;
  bool operator==(const Displacement&) const = default;
};

// Pixel grid shape of one side of a correspondence problem.
struct GridShape {
  int height = 0;
  int width = 0;
  int pixels() const { return height * width; }
};

Displacement Offset(const GridShape& a, int i, const GridShape& b, int k);

// Cosine similarity between every pixel pair; a zero feature vector scores
// zero against everything. Errors: kDimMismatch on channel mismatch.
CostVolume CostVolumeU(const RoiFeature& a, const RoiFeature& b);

// C_g(i,k) = sum_{j,l} exp(-|off(i,k) - off(j,l)|^2 / (2 gamma)) T(j,l).
//
// Offsets live on an integer lattice, so the plan is first binned by
// displacement and the bins are blurred with a separable Gaussian, then
// read back at off(i,k). The kernel is cut where it drops below 1e-6.
CostVolume GeometricConsistency(const ot::TransportPlan& plan,
                                const GridShape& a, const GridShape& b,
                                double gamma);

// Kernel support used by GeometricConsistency.
int GaussianRadius(double gamma);

struct IcmConfig {
  int icm_iters = 2;
  double gamma = 14.0;
  ot::SinkhornConfig sinkhorn;
};

struct MatchResult {
  ot::TransportPlan plan;
  CostVolume appearance;     // C_u
  CostVolume combined_cost;  // C^t fed to the final assignment
  std::vector<int> argmax_targets;
  int iterations = 0;        // number of transport solves
};

// Iterated conditional modes: C^0 = C_u, T^t = Sinkhorn(-C^t),
// C^{t+1} = C_u + C_g(T^t); runs icm_iters + 1 solves.
MatchResult IcmMatch(const RoiFeature& a, const RoiFeature& b,
                     const ot::MarginalWeights& mu_a,
                     const ot::MarginalWeights& mu_b, const IcmConfig& config);

}  // namespace discobox::corr

#endif  // DISCOBOX_CORE_CORRESPONDENCE_HPP_
