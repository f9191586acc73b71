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

#include "core/bench.hpp"

#include <chrono>

#include "core/correspondence.hpp"
#include "core/crf.hpp"
#include "core/error.hpp"
#include "core/synthgen.hpp"
#include "json.hpp"

namespace discobox {
namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
auto Timed(StageTiming& timing, Fn&& fn) {
  const auto start = Clock::now();
  auto result = fn();
  timing.seconds += std::chrono::duration<double>(Clock::now() - start).count();
  ++timing.calls;
  return result;
}

}  // namespace

std::string BenchReport::ToJson() const {
  nlohmann::json stages_json = nlohmann::json::array();
  for (const StageTiming& s : stages) {
    stages_json.push_back({{"stage", s.stage},
                           {"seconds", s.seconds},
                           {"calls", s.calls},
                           {"calls_per_second", s.seconds > 0 ? s.calls / s.seconds : 0.0}});
  }
  return nlohmann::json{{"schema_version", 1},
                        {"roi_size", roi_size},
                        {"pairs", pairs},
                        {"stages", stages_json},
                        {"total_seconds", total_seconds}}
             .dump(2) +
         "\n";
}

BenchReport RunBench(const RunConfig& config, int roi_size, int pairs) {
  Require(roi_size >= 1, ErrorCode::kInvalidArgument, "roi-size must be at least 1");
  Require(pairs >= 0, ErrorCode::kInvalidArgument, "pairs must be non-negative");
  config.Validate();
  BenchReport report;
  report.roi_size = roi_size;
  report.pairs = pairs;
  StageTiming sinkhorn{"sinkhorn"};
  StageTiming geometric{"geometric_consistency"};
  StageTiming icm{"icm_match"};
  StageTiming mean_field{"mean_field"};

  corr::IcmConfig icm_config;
  icm_config.icm_iters = config.icm_iters;
  icm_config.gamma = config.teacher.gamma;
  icm_config.sinkhorn = config.sinkhorn;
  const corr::GridShape grid{roi_size, roi_size};
  const auto start = Clock::now();
  for (int p = 0; p < pairs; ++p) {
    const synth::ShapeRoi a = synth::GenShapeRoi(config.seed + 2 * p, roi_size, 0.1);
    const synth::ShapeRoi b = synth::GenShapeRoi(config.seed + 2 * p + 1, roi_size, 0.1);
    const ot::MarginalWeights mu_a = ot::StepMarginal(a.object.mask);
    const ot::MarginalWeights mu_b = ot::StepMarginal(b.object.mask);
    const CostVolume cost = corr::CostVolumeU(a.object.feature, b.object.feature).Negated();
    const ot::TransportPlan plan =
        Timed(sinkhorn, [&] { return ot::Sinkhorn(cost, mu_a, mu_b, config.sinkhorn); });
    Timed(geometric, [&] {
      return corr::GeometricConsistency(plan, grid, grid, config.teacher.gamma);
    });
    const corr::MatchResult match = Timed(icm, [&] {
      return corr::IcmMatch(a.object.feature, b.object.feature, mu_a, mu_b, icm_config);
    });
    const crf::PairwiseKernel kernel =
        crf::BuildKernel(a.object.rgb, config.teacher.w1, config.teacher.zeta);
    const crf::CrossLink link{match.plan, match.combined_cost,
                              Labeling::Threshold(b.object.mask), config.teacher.w2};
    Timed(mean_field, [&] {
      return crf::MeanField(a.object.mask, kernel, std::span(&link, 1), config.teacher);
    });
  }
  report.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report.stages = {sinkhorn, geometric, icm, mean_field};
  return report;
}

}  // namespace discobox
