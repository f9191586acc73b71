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

// Bundle <-> object plumbing behind the refine and match commands.
//
// Input arrays per object id: rgb/<id> [3,H,W], feat/<id> [C,H,W],
// mask/<id> [H,W] (f32 probabilities or u8 scaled by 255), box/<id> [4],
// cat/<id> [1]. Optional: conf/<id> [1], tight/<id> [4] in crop pixels.

#ifndef DISCOBOX_CORE_PIPELINE_HPP_
#define DISCOBOX_CORE_PIPELINE_HPP_

#include <vector>

#include "core/bundle.hpp"
#include "core/config.hpp"
#include "core/membank.hpp"
#include "core/tensors.hpp"
#include "core/teacher.hpp"

namespace discobox {

inline constexpr int kReportSchemaVersion = 1;

// Objects in the order their rgb/<id> entries appear. kMissingEntry names
// the first id lacking a required array.
std::vector<RoiObject> ObjectsFromBundle(const TensorBundle& bundle);
TensorBundle ObjectsToBundle(const std::vector<RoiObject>& objects);

// label/<id> u8 [S,S], losses/<id> f32 [mil, con, nce, total] and a JSON
// report array under "report".
TensorBundle RefineOutputBundle(const std::vector<teacher::RefinementOutput>& outputs);
TensorBundle RunRefine(const TensorBundle& input, membank::MemoryBank& bank,
                       const RunConfig& config);

// A match bundle holds feat/<id> and optionally mask/<id> for one RoI.
// Output: plan f32 [HW_a, HW_b], argmax f32 [H_a, W_a], confidence f32
// [H_a, W_a] (plan row max), report u8 JSON.
TensorBundle RunMatch(const TensorBundle& a, const TensorBundle& b, const RunConfig& config);

}  // namespace discobox

#endif  // DISCOBOX_CORE_PIPELINE_HPP_
