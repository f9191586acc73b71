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

#include "core/correspondence.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace discobox::corr {
namespace {

// Unit-normalized pixel vectors, pixel-major. Zero vectors stay zero.
std::vector<double> NormalizedPixels(const RoiFeature& f) {
  const int c = f.channels();
  const int p = f.pixels();
  std::vector<double> out(static_cast<std::size_t>(p) * c);
  for (int i = 0; i < p; ++i) {
    double norm = 0.0;
    for (int ch = 0; ch < c; ++ch) {
      const double v = f.at(ch, i);
      out[static_cast<std::size_t>(i) * c + ch] = v;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (int ch = 0; ch < c; ++ch) out[static_cast<std::size_t>(i) * c + ch] /= norm;
    }
  }
  return out;
}

std::vector<double> GaussianTaps(double gamma, int radius) {
  std::vector<double> taps(2 * radius + 1);
  for (int d = -radius; d <= radius; ++d) {
    taps[d + radius] = std::exp(-static_cast<double>(d) * d / (2.0 * gamma));
  }
  return taps;
}

}  // namespace

Displacement Offset(const GridShape& a, int i, const GridShape& b, int k) {
  return {k % b.width - i % a.width, k / b.width - i / a.width};
}

CostVolume CostVolumeU(const RoiFeature& a, const RoiFeature& b) {
  if (a.channels() != b.channels()) {
    Fail(ErrorCode::kDimMismatch, "ChannelMismatch: feature channel counts differ (" +
                                      std::to_string(a.channels()) + " vs " +
                                      std::to_string(b.channels()) + ")");
  }
  const int c = a.channels();
  const std::vector<double> na = NormalizedPixels(a);
  const std::vector<double> nb = NormalizedPixels(b);
  CostVolume out(a.pixels(), b.pixels(), VolumeKind::kAppearance);
  for (int i = 0; i < a.pixels(); ++i) {
    const double* u = &na[static_cast<std::size_t>(i) * c];
    for (int k = 0; k < b.pixels(); ++k) {
      const double* v = &nb[static_cast<std::size_t>(k) * c];
      double dot = 0.0;
      for (int ch = 0; ch < c; ++ch) dot += u[ch] * v[ch];
      out.at(i, k) = std::clamp(dot, -1.0, 1.0);
    }
  }
  return out;
}

int GaussianRadius(double gamma) {
  return static_cast<int>(std::ceil(std::sqrt(2.0 * gamma * std::log(1e6))));
}

CostVolume GeometricConsistency(const ot::TransportPlan& plan,
                                const GridShape& a, const GridShape& b,
                                double gamma) {
  Require(gamma > 0.0, ErrorCode::kInvalidArgument, "NonPositiveGamma: gamma must be positive");
  Require(plan.rows == a.pixels() && plan.cols == b.pixels(), ErrorCode::kDimMismatch,
          "plan shape does not match the RoI grids");

  // Displacement bins: dx in [-(wa-1), wb-1], dy in [-(ha-1), hb-1].
  const int ox = a.width - 1;
  const int oy = a.height - 1;
  const int nx = a.width + b.width - 1;
  const int ny = a.height + b.height - 1;
  std::vector<double> hist(static_cast<std::size_t>(nx) * ny, 0.0);
  for (int j = 0; j < plan.rows; ++j) {
    const int xj = j % a.width;
    const int yj = j / a.width;
    for (int l = 0; l < plan.cols; ++l) {
      const int bin_x = l % b.width - xj + ox;
      const int bin_y = l / b.width - yj + oy;
      hist[static_cast<std::size_t>(bin_y) * nx + bin_x] += plan.at(j, l);
    }
  }

  // No pair of bins is further apart than the lattice span, so a wider
  // kernel would add nothing.
  const int radius = std::min(GaussianRadius(gamma), std::max(nx, ny) - 1);
  const std::vector<double> taps = GaussianTaps(gamma, radius);

  std::vector<double> blur_x(hist.size(), 0.0);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      double acc = 0.0;
      const int lo = std::max(0, x - radius);
      const int hi = std::min(nx - 1, x + radius);
      for (int s = lo; s <= hi; ++s) acc += taps[s - x + radius] * hist[static_cast<std::size_t>(y) * nx + s];
      blur_x[static_cast<std::size_t>(y) * nx + x] = acc;
    }
  }
  std::vector<double> smoothed(hist.size(), 0.0);
  for (int y = 0; y < ny; ++y) {
    const int lo = std::max(0, y - radius);
    const int hi = std::min(ny - 1, y + radius);
    for (int x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (int s = lo; s <= hi; ++s) acc += taps[s - y + radius] * blur_x[static_cast<std::size_t>(s) * nx + x];
      smoothed[static_cast<std::size_t>(y) * nx + x] = acc;
    }
  }

  CostVolume out(plan.rows, plan.cols, VolumeKind::kGeometric);
  for (int i = 0; i < plan.rows; ++i) {
    const int xi = i % a.width;
    const int yi = i / a.width;
    for (int k = 0; k < plan.cols; ++k) {
      const int bin_x = k % b.width - xi + ox;
      const int bin_y = k / b.width - yi + oy;
      out.at(i, k) = smoothed[static_cast<std::size_t>(bin_y) * nx + bin_x];
    }
  }
  return out;
}

MatchResult IcmMatch(const RoiFeature& a, const RoiFeature& b,
                     const ot::MarginalWeights& mu_a,
                     const ot::MarginalWeights& mu_b, const IcmConfig& config) {
  Require(config.icm_iters >= 0, ErrorCode::kInvalidArgument, "icm_iters must be non-negative");
  const GridShape shape_a{a.height(), a.width()};
  const GridShape shape_b{b.height(), b.width()};

  MatchResult result;
  result.appearance = CostVolumeU(a, b);
  CostVolume current = result.appearance;
  current.kind = VolumeKind::kCombined;
  for (int t = 0; t <= config.icm_iters; ++t) {
    result.plan = ot::Sinkhorn(current.Negated(), mu_a, mu_b, config.sinkhorn);
    result.iterations = t + 1;
    if (t == config.icm_iters) break;
    const CostVolume geometric = GeometricConsistency(result.plan, shape_a, shape_b, config.gamma);
    CostVolume next = result.appearance;
    next.kind = VolumeKind::kCombined;
    for (std::size_t e = 0; e < next.values.size(); ++e) next.values[e] += geometric.values[e];
    current = std::move(next);
  }
  result.combined_cost = std::move(current);
  result.argmax_targets = ot::RowArgmax(result.plan);
  return result;
}

}  // namespace discobox::corr
