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

// Multiple-instance bags from the box tightness prior.
//
// Every row and column crossing a tight box holds at least one foreground
// pixel, so the in-box part of each such line is a positive bag. Lines that
// miss the box entirely are negative bags.

#ifndef DISCOBOX_CORE_MIL_HPP_
#define DISCOBOX_CORE_MIL_HPP_

#include <vector>

#include "core/tensors.hpp"

namespace discobox::mil {

inline constexpr double kProbEps = 1e-7;

// Half-open pixel rectangle [x0, x1) x [y0, y1) in crop coordinates.
struct PixelBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool operator==(const PixelBox&) const = default;
};

enum class BagAxis { kRow, kColumn };

struct Bag {
  std::vector<int> pixel_indices;  // row-major indices into the crop
  bool positive = false;
  BagAxis axis = BagAxis::kRow;
  int line = 0;  // row or column number
};

struct BagSet {
  std::vector<Bag> bags;
  int crop_height = 0;
  int crop_width = 0;
  PixelBox box;

  int CountPositive() const;
  int CountNegative() const { return static_cast<int>(bags.size()) - CountPositive(); }
};

// Errors: kOutOfRange (box outside crop), kInvalidArgument (degenerate box).
BagSet BuildBags(int crop_height, int crop_width, const PixelBox& tight_box);

// -sum_i [y_i log(max b_i) + (1 - y_i) log(1 - max b_i)], probabilities
// clamped to [eps, 1 - eps].
double MilLossBce(const BagSet& bags, const MaskProb& mask);

// 1 - 2 sum(p_i y_i) / (sum p_i^2 + sum y_i^2) over per-bag maxima p_i.
double MilLossDice(const BagSet& bags, const MaskProb& mask);

// Largest probability inside one bag.
double BagMax(const Bag& bag, const MaskProb& mask);

}  // namespace discobox::mil

#endif  // DISCOBOX_CORE_MIL_HPP_
