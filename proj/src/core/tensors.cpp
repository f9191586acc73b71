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

#include "core/tensors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace discobox {
namespace {

void CheckFinite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFiniteValue, what);
  }
}

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Source taps for one output coordinate under half-pixel alignment.
std::vector<Tap> BuildTaps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(src));
    const int hi = std::min(lo + 1, in - 1);
    taps[o] = {lo, hi, src - lo};
  }
  return taps;
}

std::vector<float> ResamplePlane(std::span<const float> plane, int h, int w,
                                 int th, int tw) {
  const auto [mn, mx] = std::minmax_element(plane.begin(), plane.end());
  const std::vector<Tap> ty = BuildTaps(h, th);
  const std::vector<Tap> tx = BuildTaps(w, tw);
  std::vector<float> out(static_cast<std::size_t>(th) * tw);
  for (int y = 0; y < th; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < tw; ++x) {
      const Tap& b = tx[x];
      const double v00 = plane[a.lo * w + b.lo];
      const double v01 = plane[a.lo * w + b.hi];
      const double v10 = plane[a.hi * w + b.lo];
      const double v11 = plane[a.hi * w + b.hi];
      const double top = v00 + (v01 - v00) * b.frac;
      const double bottom = v10 + (v11 - v10) * b.frac;
      const double v = top + (bottom - top) * a.frac;
      out[y * tw + x] = std::clamp(static_cast<float>(v), *mn, *mx);
    }
  }
  return out;
}

}  // namespace

Grid2D::Grid2D(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  Require(height >= 0 && width >= 0, ErrorCode::kInvalidArgument,
          "grid dimensions must be non-negative");
  Require(values_.size() == static_cast<std::size_t>(height) * width,
          ErrorCode::kDimMismatch, "grid values do not match height*width");
  CheckFinite(values_, "grid contains a non-finite value");
}

Grid2D Grid2D::Filled(int height, int width, float value) {
  return Grid2D(height, width,
                std::vector<float>(static_cast<std::size_t>(height) * width,
                                   value));
}

RoiFeature::RoiFeature(int channels, int height, int width,
                       std::vector<float> values)
    : channels_(channels),
      height_(height),
      width_(width),
      values_(std::move(values)) {
  Require(channels >= 0 && height >= 0 && width >= 0,
          ErrorCode::kInvalidArgument, "tensor dimensions must be non-negative");
  Require(values_.size() ==
              static_cast<std::size_t>(channels) * height * width,
          ErrorCode::kDimMismatch, "tensor values do not match C*H*W");
  CheckFinite(values_, "tensor contains a non-finite value");
}

Grid2D RoiFeature::channel(int c) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(c) * pixels();
  return Grid2D(height_, width_, std::vector<float>(first, first + pixels()));
}

MaskProb::MaskProb(Grid2D grid) : grid_(std::move(grid)) {
  for (float v : grid_.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      Fail(ErrorCode::kOutOfRange, "mask probability outside [0, 1]");
    }
  }
}

Labeling::Labeling(Grid2D grid) : grid_(std::move(grid)) {
  for (float v : grid_.values()) {
    if (v != 0.0f && v != 1.0f) {
      Fail(ErrorCode::kOutOfRange, "labeling value is not 0 or 1");
    }
  }
}

Labeling Labeling::FromBits(int height, int width,
                            const std::vector<unsigned char>& bits) {
  std::vector<float> values(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) values[i] = bits[i] ? 1.0f : 0.0f;
  return Labeling(Grid2D(height, width, std::move(values)));
}

Labeling Labeling::Threshold(const MaskProb& mask, float threshold) {
  std::vector<float> values(mask.size());
  for (int i = 0; i < mask.size(); ++i) values[i] = mask[i] > threshold ? 1.0f : 0.0f;
  return Labeling(Grid2D(mask.height(), mask.width(), std::move(values)));
}

int Labeling::CountForeground() const {
  int n = 0;
  for (float v : grid_.values()) n += v > 0.5f ? 1 : 0;
  return n;
}

double IntersectionOverUnion(const Labeling& a, const Labeling& b) {
  Require(a.height() == b.height() && a.width() == b.width(),
          ErrorCode::kDimMismatch, "IoU of labelings with different shapes");
  int inter = 0;
  int uni = 0;
  for (int i = 0; i < a.size(); ++i) {
    inter += a[i] & b[i];
    uni += a[i] | b[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

double Box::diagonal() const { return std::hypot(width(), height()); }

void ValidateObject(const RoiObject& object) {
  const std::string who = "object '" + object.id + "': ";
  if (!object.box.valid()) Fail(ErrorCode::kInvalidArgument, who + "degenerate box");
  if (!(object.confidence >= 0.0 && object.confidence <= 1.0)) {
    Fail(ErrorCode::kOutOfRange, who + "confidence outside [0, 1]");
  }
  if (object.rgb.channels() != 3) {
    Fail(ErrorCode::kDimMismatch, who + "rgb crop must have 3 channels");
  }
  const int h = object.mask.height();
  const int w = object.mask.width();
  if (h == 0 || w == 0) Fail(ErrorCode::kInvalidArgument, who + "empty mask");
  if (object.rgb.height() != h || object.rgb.width() != w ||
      object.feature.height() != h || object.feature.width() != w) {
    Fail(ErrorCode::kDimMismatch, who + "rgb/feature/mask resolutions differ");
  }
  if (object.feature.channels() == 0) {
    Fail(ErrorCode::kDimMismatch, who + "feature has no channels");
  }
}

Grid2D ResampleRoi(const Grid2D& grid, int target_height, int target_width) {
  Require(target_height > 0 && target_width > 0, ErrorCode::kInvalidArgument,
          "ZeroTargetSize: resample target must be positive");
  Require(!grid.empty(), ErrorCode::kInvalidArgument, "resample of empty grid");
  if (grid.height() == target_height && grid.width() == target_width) return grid;
  return Grid2D(target_height, target_width,
                ResamplePlane(grid.values(), grid.height(), grid.width(),
                              target_height, target_width));
}

RoiFeature ResampleRoi(const RoiFeature& feature, int target_height,
                       int target_width) {
  Require(target_height > 0 && target_width > 0, ErrorCode::kInvalidArgument,
          "ZeroTargetSize: resample target must be positive");
  Require(feature.pixels() > 0, ErrorCode::kInvalidArgument,
          "resample of empty tensor");
  if (feature.height() == target_height && feature.width() == target_width) {
    return feature;
  }
  const int p = feature.pixels();
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(feature.channels()) * target_height *
              target_width);
  for (int c = 0; c < feature.channels(); ++c) {
    const auto plane = feature.values().subspan(static_cast<std::size_t>(c) * p, p);
    const auto r = ResamplePlane(plane, feature.height(), feature.width(),
                                 target_height, target_width);
    out.insert(out.end(), r.begin(), r.end());
  }
  return RoiFeature(feature.channels(), target_height, target_width,
                    std::move(out));
}

MaskProb ResampleRoi(const MaskProb& mask, int target_height, int target_width) {
  return MaskProb(ResampleRoi(mask.grid(), target_height, target_width));
}

RoiObject ResampleObject(const RoiObject& object, int roi_size) {
  RoiObject out = object;
  if (object.tight_box) {
    const double sx = static_cast<double>(roi_size) / object.mask.width();
    const double sy = static_cast<double>(roi_size) / object.mask.height();
    const Box& t = *object.tight_box;
    out.tight_box = Box{t.x0 * sx, t.y0 * sy, t.x1 * sx, t.y1 * sy};
  }
  out.rgb = ResampleRoi(object.rgb, roi_size, roi_size);
  out.feature = ResampleRoi(object.feature, roi_size, roi_size);
  out.mask = ResampleRoi(object.mask, roi_size, roi_size);
  return out;
}

}  // namespace discobox
