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

#include "core/crf.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace discobox::crf {
namespace {

double PhiUnchecked(double x) { return x <= 0.5 ? 0.3 : 0.7; }

void CheckLinks(const MaskProb& mask, std::span<const CrossLink> links) {
  for (const CrossLink& link : links) {
    const int n = link.neighbor_labeling.size();
    if (link.plan.rows != mask.size() || link.plan.cols != n ||
        link.cost.rows != mask.size() || link.cost.cols != n) {
      Fail(ErrorCode::kDimMismatch, "cross link shape does not match the RoI");
    }
  }
}

// Per-pixel cross-image penalty for choosing foreground (disagreeing with
// background neighbours) and background (disagreeing with foreground ones).
struct CrossTerms {
  std::vector<double> fg;
  std::vector<double> bg;
};

CrossTerms AccumulateCross(int pixels, std::span<const CrossLink> links) {
  CrossTerms terms{std::vector<double>(pixels, 0.0), std::vector<double>(pixels, 0.0)};
  for (const CrossLink& link : links) {
    for (int i = 0; i < pixels; ++i) {
      double to_fg = 0.0;
      double to_bg = 0.0;
      for (int k = 0; k < link.plan.cols; ++k) {
        const double tc = link.plan.at(i, k) * link.cost.at(i, k);
        if (link.neighbor_labeling[k]) {
          to_fg += tc;
        } else {
          to_bg += tc;
        }
      }
      terms.fg[i] += link.weight * to_bg;
      terms.bg[i] += link.weight * to_fg;
    }
  }
  return terms;
}

MeanFieldResult RunLiteral(const MaskProb& mask, const PairwiseKernel& kernel,
                           const CrossTerms& cross, const TeacherConfig& config) {
  const int n = mask.size();
  std::vector<double> q(n);
  for (int i = 0; i < n; ++i) q[i] = -std::log(PhiUnchecked(mask[i]));

  MeanFieldState state;
  std::vector<double> next(n);
  for (int it = 0; it < config.mf_iters; ++it) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const PairwiseKernel::Edge& e : kernel.edges(i)) acc += e.weight * q[e.neighbor];
      // Cross-image accumulation: w2 T(i,k) C(i,k) x^s_k summed over k.
      acc += cross.bg[i];
      const double belief = PhiUnchecked(std::exp(-acc - q[i]));
      // Normalization is the identity for a clamped scalar belief.
      next[i] = -std::log(belief);
    }
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) Fail(ErrorCode::kNonFiniteBelief, "literal belief diverged");
      delta = std::max(delta, std::abs(next[i] - q[i]));
    }
    q.swap(next);
    state.iteration = it + 1;
    if (delta < config.mf_tol) {
      state.converged = true;
      break;
    }
  }

  std::vector<float> belief(n);
  std::vector<unsigned char> bits(n);
  for (int i = 0; i < n; ++i) {
    const double p = std::exp(-q[i]);
    belief[i] = static_cast<float>(p);
    bits[i] = p > 0.5 ? 1 : 0;
  }
  state.q = Grid2D(mask.height(), mask.width(), std::move(belief));
  return {Labeling::FromBits(mask.height(), mask.width(), bits), std::move(state)};
}

double Sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

MeanFieldResult RunTwoChannel(const MaskProb& mask, const PairwiseKernel& kernel,
                              const CrossTerms& cross, const TeacherConfig& config) {
  const int n = mask.size();
  std::vector<double> unary_fg(n);
  std::vector<double> unary_bg(n);
  std::vector<double> q(n);  // foreground marginal
  for (int i = 0; i < n; ++i) {
    const double phi = PhiUnchecked(mask[i]);
    unary_fg[i] = -std::log(phi) + cross.fg[i];
    unary_bg[i] = -std::log(1.0 - phi) + cross.bg[i];
    q[i] = Sigmoid(unary_bg[i] - unary_fg[i]);
  }

  MeanFieldState state;
  std::vector<double> next(n);
  for (int it = 0; it < config.mf_iters; ++it) {
    for (int i = 0; i < n; ++i) {
      // Potts messages: label l pays k(i,j) for every neighbour mass on !l.
      double to_fg = unary_fg[i];
      double to_bg = unary_bg[i];
      for (const PairwiseKernel::Edge& e : kernel.edges(i)) {
        to_fg += e.weight * (1.0 - q[e.neighbor]);
        to_bg += e.weight * q[e.neighbor];
      }
      next[i] = Sigmoid(to_bg - to_fg);
    }
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) Fail(ErrorCode::kNonFiniteBelief, "mean-field belief diverged");
      delta = std::max(delta, std::abs(next[i] - q[i]));
    }
    q.swap(next);
    state.iteration = it + 1;
    if (delta < config.mf_tol) {
      state.converged = true;
      break;
    }
  }

  std::vector<float> belief(n);
  std::vector<unsigned char> bits(n);
  for (int i = 0; i < n; ++i) {
    belief[i] = static_cast<float>(q[i]);
    bits[i] = q[i] > 0.5 ? 1 : 0;
  }
  state.q = Grid2D(mask.height(), mask.width(), std::move(belief));
  return {Labeling::FromBits(mask.height(), mask.width(), bits), std::move(state)};
}

}  // namespace

double ThresholdPhi(double x) {
  if (!(x >= 0.0 && x <= 1.0)) Fail(ErrorCode::kOutOfRange, "threshold input outside [0, 1]");
  return PhiUnchecked(x);
}

PairwiseKernel::PairwiseKernel(int height, int width, std::vector<std::vector<Edge>> edges)
    : height_(height), width_(width), edges_(std::move(edges)) {
  Require(static_cast<int>(edges_.size()) == height * width, ErrorCode::kDimMismatch,
          "kernel adjacency size mismatch");
}

double PairwiseKernel::Weight(int i, int j) const {
  for (const Edge& e : edges_[i]) {
    if (e.neighbor == j) return e.weight;
  }
  return 0.0;
}

PairwiseKernel BuildKernel(const RoiFeature& rgb, double w1, double zeta) {
  Require(zeta > 0.0, ErrorCode::kInvalidArgument, "NonPositiveZeta: zeta must be positive");
  Require(w1 >= 0.0, ErrorCode::kInvalidArgument, "w1 must be non-negative");
  Require(rgb.channels() == 3, ErrorCode::kDimMismatch, "kernel needs a 3-channel crop");
  const int h = rgb.height();
  const int w = rgb.width();
  const double denom = 2.0 * zeta * zeta;
  std::vector<std::vector<PairwiseKernel::Edge>> edges(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int ny = y + dy;
          const int nx = x + dx;
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          const int j = ny * w + nx;
          double dist2 = 0.0;
          for (int c = 0; c < 3; ++c) {
            const double d = static_cast<double>(rgb.at(c, i)) - rgb.at(c, j);
            dist2 += d * d;
          }
          edges[i].push_back({j, w1 * std::exp(-dist2 / denom)});
        }
      }
    }
  }
  return PairwiseKernel(h, w, std::move(edges));
}

double GibbsEnergy(const Labeling& x, const MaskProb& mask,
                   const PairwiseKernel& kernel,
                   std::span<const CrossLink> links) {
  Require(x.height() == mask.height() && x.width() == mask.width() &&
              kernel.height() == mask.height() && kernel.width() == mask.width(),
          ErrorCode::kDimMismatch, "labeling, mask and kernel shapes differ");
  CheckLinks(mask, links);
  double energy = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double phi = PhiUnchecked(mask[i]);
    energy += x[i] ? -std::log(phi) : -std::log(1.0 - phi);
  }
  for (int i = 0; i < x.size(); ++i) {
    for (const PairwiseKernel::Edge& e : kernel.edges(i)) {
      if (e.neighbor > i && x[i] != x[e.neighbor]) energy += e.weight;
    }
  }
  for (const CrossLink& link : links) {
    double cross = 0.0;
    for (int i = 0; i < link.plan.rows; ++i) {
      for (int k = 0; k < link.plan.cols; ++k) {
        if (x[i] != link.neighbor_labeling[k]) cross += link.plan.at(i, k) * link.cost.at(i, k);
      }
    }
    energy += link.weight * cross;
  }
  return energy;
}

MeanFieldResult MeanField(const MaskProb& mask, const PairwiseKernel& kernel,
                          std::span<const CrossLink> links,
                          const TeacherConfig& config) {
  Require(kernel.height() == mask.height() && kernel.width() == mask.width(),
          ErrorCode::kDimMismatch, "kernel and mask shapes differ");
  Require(config.mf_iters >= 0, ErrorCode::kInvalidArgument, "mf_iters must be non-negative");
  Require(config.mf_tol >= 0.0, ErrorCode::kInvalidArgument, "mf_tol must be non-negative");
  CheckLinks(mask, links);
  const CrossTerms cross = AccumulateCross(mask.size(), links);
  return config.mode == MeanFieldMode::kLiteral ? RunLiteral(mask, kernel, cross, config)
                                                : RunTwoChannel(mask, kernel, cross, config);
}

}  // namespace discobox::crf
