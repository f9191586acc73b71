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

#include "core/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "core/error.hpp"

namespace discobox {

CostVolume CostVolume::Negated() const {
  CostVolume out = *this;
  for (double& v : out.values) v = -v;
  out.kind = VolumeKind::kCost;
  return out;
}

CostVolume CostVolume::Transposed() const {
  CostVolume out(cols, rows, kind);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) out.at(k, i) = at(i, k);
  }
  return out;
}

namespace ot {
namespace {

// Scalings beyond this are folded into the potentials.
constexpr double kScalingLimit = 1e50;
// Kernel products below this are treated as underflowed.
constexpr double kTinyMass = 1e-280;

// Solver state for T = diag(a) Kt diag(b) with
// Kt(i,k) = exp((f_i + g_k - C(i,k)) / eps). In unstabilized mode the
// potentials stay at zero and Kt is the plain Gibbs kernel.
class ScalingSolver {
 public:
  ScalingSolver(const CostVolume& cost, std::span<const double> mu_a,
                std::span<const double> mu_b, const SinkhornConfig& config)
      : cost_(cost),
        mu_a_(mu_a),
        mu_b_(mu_b),
        eps_(config.epsilon),
        stabilized_(config.stabilization == Stabilization::kAuto),
        n_(cost.rows),
        m_(cost.cols),
        f_(n_, 0.0),
        g_(m_, 0.0),
        a_(n_, 1.0),
        b_(m_, 1.0),
        kb_(n_),
        kta_(m_),
        kernel_(cost.values.size()) {
    if (stabilized_) {
      // Row-wise shift so every kernel row peaks at exactly one.
      for (int i = 0; i < n_; ++i) {
        const double* row = &cost_.values[static_cast<std::size_t>(i) * m_];
        f_[i] = *std::min_element(row, row + m_);
      }
    }
    RebuildKernel();
    if (!stabilized_) CheckPlainKernel();
  }

  // One a-update followed by one b-update, then the marginal check.
  // Returns the max marginal violation after the step.
  double Step() {
    if (!stabilized_ || AllAbove(kb_)) {
      for (int i = 0; i < n_; ++i) a_[i] = mu_a_[i] / kb_[i];
    } else {
      Absorb();
      LogUpdateRows();
    }
    MultiplyTransposed();
    if (!stabilized_ || AllAbove(kta_)) {
      for (int k = 0; k < m_; ++k) b_[k] = mu_b_[k] / kta_[k];
    } else {
      Absorb();
      LogUpdateColumns();
      MultiplyTransposed();
    }
    double worst = 0.0;
    for (int k = 0; k < m_; ++k) worst = std::max(worst, std::abs(b_[k] * kta_[k] - mu_b_[k]));
    if (!stabilized_) {
      CheckFiniteScalings();
    } else if (ScalingsOutOfRange()) {
      Absorb();
    }
    Multiply();
    for (int i = 0; i < n_; ++i) worst = std::max(worst, std::abs(a_[i] * kb_[i] - mu_a_[i]));
    return worst;
  }

  std::vector<double> Plan() const {
    std::vector<double> t(kernel_.size());
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) t[row + k] = a_[i] * kernel_[row + k] * b_[k];
    }
    return t;
  }

  void Start() { Multiply(); }

 private:
  static bool AllAbove(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return x > kTinyMass && std::isfinite(x); });
  }

  void RebuildKernel() {
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) {
        kernel_[row + k] = std::exp((f_[i] + g_[k] - cost_.values[row + k]) / eps_);
      }
    }
  }

  void CheckPlainKernel() const {
    std::vector<bool> col_alive(m_, false);
    for (int i = 0; i < n_; ++i) {
      bool row_alive = false;
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) {
        if (kernel_[row + k] > 0.0) {
          row_alive = true;
          col_alive[k] = true;
        }
      }
      if (!row_alive) {
        Fail(ErrorCode::kNumericalUnderflow,
             "kernel row " + std::to_string(i) + " is zero; epsilon too small for the cost scale");
      }
    }
    for (int k = 0; k < m_; ++k) {
      if (!col_alive[k]) {
        Fail(ErrorCode::kNumericalUnderflow,
             "kernel column " + std::to_string(k) + " is zero; epsilon too small for the cost scale");
      }
    }
  }

  void CheckFiniteScalings() const {
    for (double v : a_) {
      if (!std::isfinite(v) || v == 0.0) {
        Fail(ErrorCode::kNumericalUnderflow, "row scaling left the representable range");
      }
    }
    for (double v : b_) {
      if (!std::isfinite(v) || v == 0.0) {
        Fail(ErrorCode::kNumericalUnderflow, "column scaling left the representable range");
      }
    }
  }

  bool ScalingsOutOfRange() const {
    auto bad = [](double v) { return v > kScalingLimit || v < 1.0 / kScalingLimit; };
    return std::any_of(a_.begin(), a_.end(), bad) || std::any_of(b_.begin(), b_.end(), bad);
  }

  void Absorb() {
    for (int i = 0; i < n_; ++i) {
      f_[i] += eps_ * std::log(a_[i]);
      a_[i] = 1.0;
    }
    for (int k = 0; k < m_; ++k) {
      g_[k] += eps_ * std::log(b_[k]);
      b_[k] = 1.0;
    }
    RebuildKernel();
  }

  // Exact a-update in the log domain; requires a = b = 1.
  void LogUpdateRows() {
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      double peak = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < m_; ++k) peak = std::max(peak, g_[k] - cost_.values[row + k]);
      double sum = 0.0;
      for (int k = 0; k < m_; ++k) sum += std::exp((g_[k] - cost_.values[row + k] - peak) / eps_);
      f_[i] = eps_ * std::log(mu_a_[i]) - peak - eps_ * std::log(sum);
    }
    RebuildKernel();
  }

  void LogUpdateColumns() {
    std::vector<double> peak(m_, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) peak[k] = std::max(peak[k], f_[i] - cost_.values[row + k]);
    }
    std::vector<double> sum(m_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const std::size_t row = static_cast<std::size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) {
        sum[k] += std::exp((f_[i] - cost_.values[row + k] - peak[k]) / eps_);
      }
    }
    for (int k = 0; k < m_; ++k) {
      g_[k] = eps_ * std::log(mu_b_[k]) - peak[k] - eps_ * std::log(sum[k]);
    }
    RebuildKernel();
  }

  void Multiply() {
    for (int i = 0; i < n_; ++i) {
      const double* row = &kernel_[static_cast<std::size_t>(i) * m_];
      double acc = 0.0;
      for (int k = 0; k < m_; ++k) acc += row[k] * b_[k];
      kb_[i] = acc;
    }
  }

  void MultiplyTransposed() {
    std::fill(kta_.begin(), kta_.end(), 0.0);
    for (int i = 0; i < n_; ++i) {
      const double* row = &kernel_[static_cast<std::size_t>(i) * m_];
      const double ai = a_[i];
      for (int k = 0; k < m_; ++k) kta_[k] += row[k] * ai;
    }
  }

  const CostVolume& cost_;
  std::span<const double> mu_a_;
  std::span<const double> mu_b_;
  double eps_;
  bool stabilized_;
  int n_;
  int m_;
  std::vector<double> f_, g_, a_, b_, kb_, kta_;
  std::vector<double> kernel_;
};

void CheckMarginal(const MarginalWeights& mu, int expected, const char* side) {
  if (static_cast<int>(mu.weights.size()) != expected) {
    Fail(ErrorCode::kDimMismatch, std::string(side) + " marginal length differs from cost volume");
  }
  for (double w : mu.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      Fail(ErrorCode::kInvalidArgument, std::string(side) + " marginal must be strictly positive");
    }
  }
}

}  // namespace

MarginalWeights MarginalWeights::FromWeights(std::vector<double> weights) {
  MarginalWeights mu;
  mu.total_mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  mu.weights = std::move(weights);
  return mu;
}

std::vector<double> TransportPlan::RowSums() const {
  std::vector<double> s(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) s[i] += at(i, k);
  }
  return s;
}

std::vector<double> TransportPlan::ColSums() const {
  std::vector<double> s(cols, 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) s[k] += at(i, k);
  }
  return s;
}

TransportPlan TransportPlan::Transposed() const {
  TransportPlan t = *this;
  std::swap(t.rows, t.cols);
  std::swap(t.source, t.target);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      t.values[static_cast<std::size_t>(k) * rows + i] = at(i, k);
    }
  }
  return t;
}

double StepWeight(double probability) { return probability > 0.5 ? 1.0 : 0.6; }

MarginalWeights StepMarginal(const MaskProb& mask) {
  std::vector<double> w(mask.size());
  for (int i = 0; i < mask.size(); ++i) w[i] = StepWeight(mask[i]);
  return MarginalWeights::FromWeights(std::move(w));
}

MarginalWeights BalanceTarget(const MarginalWeights& source,
                              const MarginalWeights& target) {
  Require(target.total_mass > 0.0, ErrorCode::kInvalidArgument,
          "target marginal has no mass");
  if (source.total_mass == target.total_mass) return target;
  const double scale = source.total_mass / target.total_mass;
  std::vector<double> w = target.weights;
  for (double& v : w) v *= scale;
  MarginalWeights out;
  out.weights = std::move(w);
  out.total_mass = source.total_mass;
  return out;
}

TransportPlan Sinkhorn(const CostVolume& cost, const MarginalWeights& mu_a,
                       const MarginalWeights& mu_b,
                       const SinkhornConfig& config) {
  Require(config.epsilon > 0.0 && std::isfinite(config.epsilon),
          ErrorCode::kInvalidArgument, "epsilon must be positive");
  Require(config.t_max >= 1, ErrorCode::kInvalidArgument, "t_max must be at least 1");
  Require(cost.rows > 0 && cost.cols > 0, ErrorCode::kInvalidArgument,
          "empty cost volume");
  for (double v : cost.values) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFiniteCost, "cost volume has a non-finite entry");
  }
  CheckMarginal(mu_a, cost.rows, "source");
  CheckMarginal(mu_b, cost.cols, "target");
  const MarginalWeights target = BalanceTarget(mu_a, mu_b);

  ScalingSolver solver(cost, mu_a.weights, target.weights, config);
  solver.Start();
  TransportPlan plan;
  plan.rows = cost.rows;
  plan.cols = cost.cols;
  plan.epsilon = config.epsilon;
  plan.source = mu_a;
  plan.target = target;
  for (int t = 0; t < config.t_max; ++t) {
    plan.max_violation = solver.Step();
    plan.iterations_run = t + 1;
    if (plan.max_violation < config.tol) {
      plan.converged = true;
      break;
    }
  }
  plan.values = solver.Plan();
  for (double v : plan.values) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNumericalUnderflow, "transport plan is not finite");
  }
  return plan;
}

double TransportCost(const TransportPlan& plan, const CostVolume& cost) {
  Require(plan.rows == cost.rows && plan.cols == cost.cols, ErrorCode::kDimMismatch,
          "plan and cost shapes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < plan.values.size(); ++i) total += plan.values[i] * cost.values[i];
  return total;
}

std::vector<int> RowArgmax(const TransportPlan& plan) {
  std::vector<int> out(plan.rows, 0);
  for (int i = 0; i < plan.rows; ++i) {
    double best = plan.at(i, 0);
    for (int k = 1; k < plan.cols; ++k) {
      if (plan.at(i, k) > best) {
        best = plan.at(i, k);
        out[i] = k;
      }
    }
  }
  return out;
}

}  // namespace ot
}  // namespace discobox
