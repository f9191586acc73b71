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

// Grid data model shared by every module: scalar maps, multi-channel RoI
// tensors, and the per-object record the teacher consumes.

#ifndef DISCOBOX_CORE_TENSORS_HPP_
#define DISCOBOX_CORE_TENSORS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace discobox {

// Row-major H x W float map. All values are finite.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(int height, int width, std::vector<float> values);
  static Grid2D Filled(int height, int width, float value);

  int height() const { return height_; }
  int width() const { return width_; }
  int size() const { return height_ * width_; }
  bool empty() const { return size() == 0; }

  float operator[](int index) const { return values_[index]; }
  float at(int y, int x) const { return values_[y * width_ + x]; }
  std::span<const float> values() const { return values_; }

  bool operator==(const Grid2D&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

// C x H x W tensor, channel-major. Used for RoI features and RGB crops.
class RoiFeature {
 public:
  RoiFeature() = default;
  RoiFeature(int channels, int height, int width, std::vector<float> values);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int pixels() const { return height_ * width_; }

  float at(int c, int pixel) const {
    return values_[static_cast<std::size_t>(c) * pixels() + pixel];
  }
  std::span<const float> values() const { return values_; }
  Grid2D channel(int c) const;

  bool operator==(const RoiFeature&) const = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

// Foreground probability per pixel, every value in [0, 1].
class MaskProb {
 public:
  MaskProb() = default;
  explicit MaskProb(Grid2D grid);

  const Grid2D& grid() const { return grid_; }
  int height() const { return grid_.height(); }
  int width() const { return grid_.width(); }
  int size() const { return grid_.size(); }
  float operator[](int i) const { return grid_[i]; }

  bool operator==(const MaskProb&) const = default;

 private:
  Grid2D grid_;
};

// Binary labeling, every value exactly 0 or 1.
class Labeling {
 public:
  Labeling() = default;
  explicit Labeling(Grid2D grid);
  static Labeling FromBits(int height, int width,
                           const std::vector<unsigned char>& bits);
  // 1[m > threshold] per pixel.
  static Labeling Threshold(const MaskProb& mask, float threshold = 0.5f);

  const Grid2D& grid() const { return grid_; }
  int height() const { return grid_.height(); }
  int width() const { return grid_.width(); }
  int size() const { return grid_.size(); }
  int operator[](int i) const { return grid_[i] > 0.5f ? 1 : 0; }
  int CountForeground() const;

  bool operator==(const Labeling&) const = default;

 private:
  Grid2D grid_;
};

double IntersectionOverUnion(const Labeling& a, const Labeling& b);

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diagonal() const;
  bool valid() const { return x1 > x0 && y1 > y0; }
};

// One detected object: crops and maps share the RoI resolution.
struct RoiObject {
  std::string id;
  int category = 0;
  Box box;
  double confidence = 1.0;
  RoiFeature rgb;  // 3 channels, 0..255 scale
  RoiFeature feature;
  MaskProb mask;
  double area = 0;  // image pixels^2, normally box.area()
  // Tight box in crop pixel coordinates; the whole crop when absent.
  std::optional<Box> tight_box;
};

// Throws kInvalidArgument naming the object when the invariants fail.
void ValidateObject(const RoiObject& object);

// Bilinear resample with half-pixel centers. Output stays inside the input
// value range.
Grid2D ResampleRoi(const Grid2D& grid, int target_height, int target_width);
RoiFeature ResampleRoi(const RoiFeature& feature, int target_height,
                       int target_width);
MaskProb ResampleRoi(const MaskProb& mask, int target_height,
                     int target_width);

// Brings rgb/feature/mask to a common square resolution.
RoiObject ResampleObject(const RoiObject& object, int roi_size);

}  // namespace discobox

#endif  // DISCOBOX_CORE_TENSORS_HPP_
