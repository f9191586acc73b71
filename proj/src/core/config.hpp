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

// Run configuration: every tunable of the engine in one flat record,
// readable from "key = value" text with '#' comments.

#ifndef DISCOBOX_CORE_CONFIG_HPP_
#define DISCOBOX_CORE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/crf.hpp"
#include "core/transport.hpp"

namespace discobox {

struct LossWeights {
  double alpha_mil = 10.0;
  double alpha_con = 2.0;
  double alpha_nce = 0.1;
};

// Weights used with the SOLOv2-style head.
inline constexpr LossWeights kSoloLossWeights{1.0, 1.0, 0.1};

enum class MilVariant { kBce, kDice };

struct RunConfig {
  crf::TeacherConfig teacher;
  ot::SinkhornConfig sinkhorn;
  int icm_iters = 2;
  int roi_size = 32;
  LossWeights weights;
  double tau = 0.07;
  std::uint64_t seed = 0;
  MilVariant mil_variant = MilVariant::kBce;
  bool nce_foreground_only = false;
  int threads = 1;

  // Errors: kUnknownConfigKey, kParseError.
  void Set(std::string_view key, std::string_view value);
  void LoadText(std::string_view text);
  void LoadFile(const std::filesystem::path& path);
  // Checks ranges; kInvalidArgument on the first bad field.
  void Validate() const;
  std::string ToText() const;

  static const std::vector<std::string>& Keys();
};

}  // namespace discobox

#endif  // DISCOBOX_CORE_CONFIG_HPP_
