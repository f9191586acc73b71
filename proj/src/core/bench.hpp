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

#ifndef DISCOBOX_CORE_BENCH_HPP_
#define DISCOBOX_CORE_BENCH_HPP_

#include <string>
#include <vector>

#include "core/config.hpp"

namespace discobox {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
  int calls = 0;
};

struct BenchReport {
  int roi_size = 0;
  int pairs = 0;
  std::vector<StageTiming> stages;
  double total_seconds = 0.0;

  std::string ToJson() const;
};

// Times sinkhorn, geometric consistency, icm_match and mean field on
// synthetic shape pairs. Errors: kInvalidArgument for roi_size < 1 or
// pairs < 0.
BenchReport RunBench(const RunConfig& config, int roi_size, int pairs);

}  // namespace discobox

#endif  // DISCOBOX_CORE_BENCH_HPP_
