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

// Structured teacher: matches each RoI against retrieved intra-class
// objects, refines its mask with mean field, and scores the
// self-ensembling losses.

#ifndef DISCOBOX_CORE_TEACHER_HPP_
#define DISCOBOX_CORE_TEACHER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/correspondence.hpp"
#include "core/crf.hpp"
#include "core/membank.hpp"
#include "core/mil.hpp"
#include "core/tensors.hpp"

namespace discobox::teacher {

inline constexpr double kEmaMomentum = 0.999;

struct LossReport {
  double mil = 0.0;
  double con = 0.0;
  double nce = 0.0;
  double total = 0.0;
};

struct RefinementOutput {
  std::string id;
  Labeling pseudo_label;
  crf::MeanFieldState state;
  std::vector<std::string> neighbor_ids;
  std::vector<corr::MatchResult> matches;
  LossReport losses;
};

struct ParamVector {
  std::vector<double> values;
  std::uint64_t version = 0;
};

// Refines every object against the bank, then pushes the batch into the
// bank in input order. Retrieval for object n is seeded from
// (config.seed, n).
std::vector<RefinementOutput> RefineBatch(const std::vector<RoiObject>& objects,
                                          membank::MemoryBank& bank,
                                          const RunConfig& config);

// Pixel-mean binary cross-entropy between pseudo-label and mask.
double ConsistencyLoss(const Labeling& x, const MaskProb& m);

// Mean over source pixels of -log softmax_k(C_u(i,k)/tau) at the plan's
// argmax target. With foreground set, only those pixels are averaged.
double NceLoss(const CostVolume& appearance, const ot::TransportPlan& plan,
               double tau, const Labeling* foreground = nullptr);

double TotalLoss(double l_mil, double l_con, double l_nce, const LossWeights& weights);

// theta_t <- m theta_t + (1 - m) theta_s. Errors: kLengthMismatch,
// kOutOfRange for m outside [0, 1].
ParamVector EmaUpdate(const ParamVector& teacher, const ParamVector& student,
                      double momentum = kEmaMomentum);

// Tight box of an object at RoI resolution, snapped outwards to pixels.
mil::PixelBox TightPixelBox(const RoiObject& object);

std::uint64_t RetrievalSeed(std::uint64_t seed, std::size_t index);

}  // namespace discobox::teacher

#endif  // DISCOBOX_CORE_TEACHER_HPP_
