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

// Entropy-regularized optimal transport between two pixel sets.
//
// The solver minimizes <T, C> - eps H(T) subject to T 1 = mu_a and
// T^T 1 = mu_b by alternating the scalings a = mu_a / (K b) and
// b = mu_b / (K^T a) with K = exp(-C / eps), starting from b = 1.
// Callers that want to maximize a similarity pass its negation.

#ifndef DISCOBOX_CORE_TRANSPORT_HPP_
#define DISCOBOX_CORE_TRANSPORT_HPP_

#include <span>
#include <vector>

#include "core/tensors.hpp"

namespace discobox {

enum class VolumeKind { kAppearance, kGeometric, kCombined, kCost };

// Dense rows x cols matrix of pairwise scores between two pixel sets.
struct CostVolume {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  VolumeKind kind = VolumeKind::kCost;

  CostVolume() = default;
  CostVolume(int r, int c, VolumeKind k)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0), kind(k) {}

  double at(int i, int k) const { return values[static_cast<std::size_t>(i) * cols + k]; }
  double& at(int i, int k) { return values[static_cast<std::size_t>(i) * cols + k]; }

  CostVolume Negated() const;
  CostVolume Transposed() const;
};

namespace ot {

struct MarginalWeights {
  std::vector<double> weights;
  double total_mass = 0.0;

  static MarginalWeights FromWeights(std::vector<double> weights);
};

struct TransportPlan {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major, non-negative
  double epsilon = 0.0;
  int iterations_run = 0;
  bool converged = false;
  double max_violation = 0.0;  // max abs marginal error at exit
  MarginalWeights source;      // row marginal actually enforced
  MarginalWeights target;      // column marginal after balancing

  double at(int i, int k) const { return values[static_cast<std::size_t>(i) * cols + k]; }
  std::vector<double> RowSums() const;
  std::vector<double> ColSums() const;
  TransportPlan Transposed() const;
};

enum class Stabilization {
  kNone,  // plain scaling on exp(-C/eps); underflow is an error
  kAuto,  // absorbs scalings into log-domain potentials when needed
};

struct SinkhornConfig {
  double epsilon = 0.05;
  int t_max = 100;
  double tol = 1e-6;
  Stabilization stabilization = Stabilization::kAuto;
};

// Step marginal: 1.0 where the mask exceeds 0.5, otherwise 0.6.
MarginalWeights StepMarginal(const MaskProb& mask);
double StepWeight(double probability);

// Rescales target so that both sides carry the source's total mass.
MarginalWeights BalanceTarget(const MarginalWeights& source,
                              const MarginalWeights& target);

// Errors: kNonFiniteCost, kNumericalUnderflow, kInvalidArgument,
// kDimMismatch. Target mass is balanced to the source before solving.
TransportPlan Sinkhorn(const CostVolume& cost, const MarginalWeights& mu_a,
                       const MarginalWeights& mu_b,
                       const SinkhornConfig& config = {});

// Frobenius inner product <T, C>.
double TransportCost(const TransportPlan& plan, const CostVolume& cost);

// argmax_k T(i, k) per row, lowest index on ties.
std::vector<int> RowArgmax(const TransportPlan& plan);

}  // namespace ot
}  // namespace discobox

#endif  // DISCOBOX_CORE_TRANSPORT_HPP_
