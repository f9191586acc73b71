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

#include "core/mil.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace discobox::mil {
namespace {

void CheckShape(const BagSet& bags, const MaskProb& mask) {
  Require(mask.height() == bags.crop_height && mask.width() == bags.crop_width,
          ErrorCode::kDimMismatch, "mask shape differs from bag crop");
}

Bag RowBag(int row, int x0, int x1, int width, bool positive) {
  Bag bag{{}, positive, BagAxis::kRow, row};
  for (int x = x0; x < x1; ++x) bag.pixel_indices.push_back(row * width + x);
  return bag;
}

Bag ColumnBag(int col, int y0, int y1, int width, bool positive) {
  Bag bag{{}, positive, BagAxis::kColumn, col};
  for (int y = y0; y < y1; ++y) bag.pixel_indices.push_back(y * width + col);
  return bag;
}

}  // namespace

int BagSet::CountPositive() const {
  return static_cast<int>(
      std::count_if(bags.begin(), bags.end(), [](const Bag& b) { return b.positive; }));
}

BagSet BuildBags(int crop_height, int crop_width, const PixelBox& box) {
  if (box.x1 <= box.x0 || box.y1 <= box.y0) {
    Fail(ErrorCode::kInvalidArgument, "DegenerateBox: tight box has zero extent");
  }
  if (box.x0 < 0 || box.y0 < 0 || box.x1 > crop_width || box.y1 > crop_height) {
    Fail(ErrorCode::kOutOfRange, "BoxOutsideCrop: tight box exceeds the crop");
  }
  BagSet set;
  set.crop_height = crop_height;
  set.crop_width = crop_width;
  set.box = box;
  for (int y = 0; y < crop_height; ++y) {
    const bool inside = y >= box.y0 && y < box.y1;
    set.bags.push_back(inside ? RowBag(y, box.x0, box.x1, crop_width, true)
                              : RowBag(y, 0, crop_width, crop_width, false));
  }
  for (int x = 0; x < crop_width; ++x) {
    const bool inside = x >= box.x0 && x < box.x1;
    set.bags.push_back(inside ? ColumnBag(x, box.y0, box.y1, crop_width, true)
                              : ColumnBag(x, 0, crop_height, crop_width, false));
  }
  return set;
}

double BagMax(const Bag& bag, const MaskProb& mask) {
  float best = 0.0f;
  for (int i : bag.pixel_indices) best = std::max(best, mask[i]);
  return best;
}

double MilLossBce(const BagSet& bags, const MaskProb& mask) {
  CheckShape(bags, mask);
  double loss = 0.0;
  for (const Bag& bag : bags.bags) {
    const double p = std::clamp(BagMax(bag, mask), kProbEps, 1.0 - kProbEps);
    loss -= bag.positive ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

double MilLossDice(const BagSet& bags, const MaskProb& mask) {
  CheckShape(bags, mask);
  Require(!bags.bags.empty(), ErrorCode::kEmptyBagSet, "dice loss over zero bags");
  double overlap = 0.0;
  double pred_sq = 0.0;
  double label_sq = 0.0;
  for (const Bag& bag : bags.bags) {
    const double p = BagMax(bag, mask);
    const double y = bag.positive ? 1.0 : 0.0;
    overlap += p * y;
    pred_sq += p * p;
    label_sq += y * y;
  }
  const double denom = pred_sq + label_sq;
  // No positive bags and an all-zero prediction agree perfectly.
  if (denom == 0.0) return 0.0;
  return 1.0 - 2.0 * overlap / denom;
}

}  // namespace discobox::mil
