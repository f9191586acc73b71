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

// Two-label random field over one RoI.
//
// Energy of a labeling x:
//   unary     sum_i psi(x_i), psi(1) = -log phi(m_i), psi(0) = -log(1 - phi(m_i))
//   pairwise  sum over unordered 8-neighbour pairs k(i,j) [x_i != x_j]
//   cross     sum over links w sum_{i,k} T(i,k) C(i,k) [x_i != x^s_k]
// with phi the 0.3 / 0.7 threshold map and k the contrast-sensitive kernel.

#ifndef DISCOBOX_CORE_CRF_HPP_
#define DISCOBOX_CORE_CRF_HPP_

#include <span>
#include <utility>
#include <vector>

#include "core/tensors.hpp"
#include "core/transport.hpp"

namespace discobox::crf {

// 0.3 for x <= 0.5, 0.7 above. Errors: kOutOfRange outside [0, 1].
double ThresholdPhi(double x);

// 8-connected contrast-sensitive weights w1 exp(-|I_i - I_j|^2 / (2 zeta^2)).
class PairwiseKernel {
 public:
  struct Edge {
    int neighbor;
    double weight;
  };

  PairwiseKernel() = default;
  PairwiseKernel(int height, int width, std::vector<std::vector<Edge>> edges);

  int height() const { return height_; }
  int width() const { return width_; }
  int size() const { return height_ * width_; }
  std::span<const Edge> edges(int pixel) const { return edges_[pixel]; }
  // Weight of the ordered pair, 0 when not adjacent.
  double Weight(int i, int j) const;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::vector<Edge>> edges_;
};

// rgb must have three channels. Errors: kInvalidArgument for zeta <= 0.
PairwiseKernel BuildKernel(const RoiFeature& rgb, double w1, double zeta);

// Cross-image potential towards one retrieved object. plan/cost rows are the
// source pixels, columns the neighbour's pixels.
struct CrossLink {
  ot::TransportPlan plan;
  CostVolume cost;
  Labeling neighbor_labeling;
  double weight = 0.5;
};

enum class MeanFieldMode {
  kLiteral,     // scalar belief recursion with the 0.3 / 0.7 clamp
  kTwoChannel,  // normalized {fg, bg} Potts mean field
};

struct TeacherConfig {
  double w1 = 1.0;
  double w2 = 0.5;
  double zeta = 13.0;
  double gamma = 14.0;
  int mf_iters = 10;
  double mf_tol = 1e-4;
  MeanFieldMode mode = MeanFieldMode::kTwoChannel;
};

struct MeanFieldState {
  Grid2D q;  // foreground belief per pixel
  int iteration = 0;
  bool converged = false;
};

struct MeanFieldResult {
  Labeling labeling;
  MeanFieldState state;
};

double GibbsEnergy(const Labeling& x, const MaskProb& mask,
                   const PairwiseKernel& kernel,
                   std::span<const CrossLink> links);

// Errors: kDimMismatch, kNonFiniteBelief, kInvalidArgument.
MeanFieldResult MeanField(const MaskProb& mask, const PairwiseKernel& kernel,
                          std::span<const CrossLink> links,
                          const TeacherConfig& config);

}  // namespace discobox::crf

#endif  // DISCOBOX_CORE_CRF_HPP_
