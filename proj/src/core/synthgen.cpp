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

#include "core/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "core/error.hpp"

namespace discobox::synth {
namespace {

using Rng = std::mt19937_64;

constexpr double kColorNoiseSigma = 6.0;
constexpr double kMinColorDistance = 120.0;
constexpr Box kSyntheticBox{0.0, 0.0, 64.0, 64.0};

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::array<double, 3> RandomColor(Rng& rng) {
  return {Uniform(rng, 0, 255), Uniform(rng, 0, 255), Uniform(rng, 0, 255)};
}

RoiObject BaseObject(std::string id, int size, int channels, std::vector<float> features) {
  RoiObject object;
  object.id = std::move(id);
  object.category = 1;
  object.box = kSyntheticBox;
  object.area = kSyntheticBox.area();
  object.rgb = RoiFeature(3, size, size, std::vector<float>(3 * size * size, 128.0f));
  object.feature = RoiFeature(channels, size, size, std::move(features));
  object.mask = MaskProb(Grid2D::Filled(size, size, 1.0f));
  return object;
}

}  // namespace

ShapeRoi GenShapeRoi(std::uint64_t seed, int size, double noise_rate) {
  Require(size >= 1, ErrorCode::kInvalidArgument, "shape size must be positive");
  Require(noise_rate >= 0.0 && noise_rate < 1.0, ErrorCode::kOutOfRange,
          "noise_rate must lie in [0, 1)");
  Rng rng(seed);
  const double cx = Uniform(rng, 0.35, 0.65) * size;
  const double cy = Uniform(rng, 0.35, 0.65) * size;
  const double rx = Uniform(rng, 0.2, 0.4) * size;
  const double ry = Uniform(rng, 0.2, 0.4) * size;
  const double theta = Uniform(rng, 0.0, std::numbers::pi);
  const std::array<double, 3> fg = RandomColor(rng);
  std::array<double, 3> bg = RandomColor(rng);
  while (std::hypot(fg[0] - bg[0], fg[1] - bg[1], fg[2] - bg[2]) < kMinColorDistance) {
    bg = RandomColor(rng);
  }

  const int n = size * size;
  std::vector<unsigned char> truth(n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double u = (c * dx + s * dy) / rx;
      const double v = (-s * dx + c * dy) / ry;
      truth[y * size + x] = u * u + v * v <= 1.0 ? 1 : 0;
    }
  }

  std::normal_distribution<double> noise(0.0, kColorNoiseSigma);
  std::bernoulli_distribution flip(noise_rate);
  std::vector<float> rgb(3 * n);
  std::vector<float> features(kShapeFeatureChannels * n);
  std::vector<float> mask(n);
  for (int i = 0; i < n; ++i) {
    const auto& color = truth[i] ? fg : bg;
    for (int ch = 0; ch < 3; ++ch) {
      const double v = std::clamp(color[ch] + noise(rng), 0.0, 255.0);
      rgb[ch * n + i] = static_cast<float>(v);
      features[ch * n + i] = static_cast<float>(v / 255.0 - 0.5);
    }
    features[3 * n + i] = 0.5f;
    const bool flipped = noise_rate > 0.0 && flip(rng);
    mask[i] = (truth[i] != 0) != flipped ? 1.0f : 0.0f;
  }

  ShapeRoi out;
  out.truth = Labeling::FromBits(size, size, truth);
  out.object = BaseObject("shape_" + std::to_string(seed), size, kShapeFeatureChannels,
                          std::move(features));
  out.object.rgb = RoiFeature(3, size, size, std::move(rgb));
  out.object.mask = MaskProb(Grid2D(size, size, std::move(mask)));
  int x0 = size, y0 = size, x1 = 0, y1 = 0;
  for (int i = 0; i < n; ++i) {
    if (!truth[i]) continue;
    x0 = std::min(x0, i % size);
    y0 = std::min(y0, i / size);
    x1 = std::max(x1, i % size + 1);
    y1 = std::max(y1, i / size + 1);
  }
  if (x1 > x0) out.object.tight_box = Box{double(x0), double(y0), double(x1), double(y1)};
  return out;
}

PermutedPair GenPermutedPair(std::uint64_t seed, int size, bool identity) {
  Require(size >= 1, ErrorCode::kInvalidArgument, "pair size must be positive");
  Rng rng(seed);
  const int n = size * size;
  const int channels = kPairFeatureChannels;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<float> fa(static_cast<std::size_t>(channels) * n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(channels);
    double norm = 0.0;
    for (double& x : v) {
      x = gauss(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (int ch = 0; ch < channels; ++ch) fa[ch * n + i] = static_cast<float>(v[ch] / norm);
  }

  PermutedPair out;
  out.permutation.resize(n);
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  if (!identity) std::shuffle(out.permutation.begin(), out.permutation.end(), rng);
  std::vector<float> fb(fa.size());
  for (int i = 0; i < n; ++i) {
    for (int ch = 0; ch < channels; ++ch) fb[ch * n + out.permutation[i]] = fa[ch * n + i];
  }
  out.a = BaseObject("perm_a_" + std::to_string(seed), size, channels, std::move(fa));
  if (identity) {
    out.b = out.a;
  } else {
    out.b = BaseObject("perm_b_" + std::to_string(seed), size, channels, std::move(fb));
  }
  return out;
}

MetricFixture GenMetricFixture(std::uint64_t seed, int n_pairs, double noise_px) {
  Require(n_pairs >= 0, ErrorCode::kInvalidArgument, "n_pairs must be non-negative");
  Require(noise_px >= 0.0, ErrorCode::kInvalidArgument, "noise_px must be non-negative");
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 480.0;
  constexpr int kGridCols = 4;
  constexpr int kGridRows = 2;
  static const std::array<const char*, 3> kCategories = {"car", "bus", "bicycle"};
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution visible(0.85);
  std::bernoulli_distribution far_pose(0.2);

  auto make_object = [&](const std::string& image_id, const std::string& category,
                         double orientation) {
    metric::AnnotatedObject o;
    o.image_id = image_id;
    o.category = category;
    const double w = Uniform(rng, 120, 300);
    const double h = Uniform(rng, 100, 200);
    const double x0 = Uniform(rng, 10, kWidth - w - 10);
    const double y0 = Uniform(rng, 10, kHeight - h - 10);
    o.box = Box{x0, y0, x0 + w, y0 + h};
    o.orientation = orientation;
    // One keypoint per grid cell, kept in the cell's middle half so that
    // keypoints stay well separated.
    for (int r = 0; r < kGridRows; ++r) {
      for (int col = 0; col < kGridCols; ++col) {
        const double cw = w / kGridCols;
        const double ch = h / kGridRows;
        metric::Keypoint kp;
        kp.name = "kp" + std::to_string(r * kGridCols + col);
        kp.xy = {x0 + cw * (col + Uniform(rng, 0.25, 0.75)), y0 + ch * (r + Uniform(rng, 0.25, 0.75))};
        kp.visible = visible(rng);
        o.keypoints.push_back(kp);
      }
    }
    return o;
  };
  auto jitter = [&](const metric::Point& p) {
    if (noise_px == 0.0) return p;
    return metric::Point{std::clamp(p.x + noise_px * gauss(rng), 0.0, kWidth),
                         std::clamp(p.y + noise_px * gauss(rng), 0.0, kHeight)};
  };

  MetricFixture out;
  for (int p = 0; p < n_pairs; ++p) {
    const std::string category = kCategories[p % kCategories.size()];
    const double base = Uniform(rng, 0, 360);
    const double gap = far_pose(rng) ? Uniform(rng, 70, 180) : Uniform(rng, -50, 50);
    const std::string ida = "pair" + std::to_string(p) + "_a";
    const std::string idb = "pair" + std::to_string(p) + "_b";
    metric::AnnotatedObject oa = make_object(ida, category, base);
    metric::AnnotatedObject ob = make_object(idb, category, std::fmod(base + gap + 360.0, 360.0));
    const double conf = Uniform(rng, 0.3, 1.0) * Uniform(rng, 0.3, 1.0);
    for (std::size_t k = 0; k < oa.keypoints.size(); ++k) {
      if (!oa.keypoints[k].visible || !ob.keypoints[k].visible) continue;
      metric::CorrespondencePrediction pred;
      pred.source_image = ida;
      pred.target_image = idb;
      pred.category = category;
      pred.source_box = oa.box;
      pred.target_box = ob.box;
      pred.source = jitter(oa.keypoints[k].xy);
      pred.target = jitter(ob.keypoints[k].xy);
      pred.confidence = conf;
      out.predictions.push_back(pred);
    }
    out.images.push_back({ida, kWidth, kHeight, {std::move(oa)}});
    out.images.push_back({idb, kWidth, kHeight, {std::move(ob)}});
  }
  return out;
}

}  // namespace discobox::synth
