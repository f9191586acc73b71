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

#include "core/teacher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "core/error.hpp"

namespace discobox::teacher {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

corr::IcmConfig MatcherConfig(const RunConfig& config) {
  corr::IcmConfig icm;
  icm.icm_iters = config.icm_iters;
  icm.gamma = config.teacher.gamma;
  icm.sinkhorn = config.sinkhorn;
  return icm;
}

RefinementOutput RefineOne(const RoiObject& object, std::size_t index,
                           const membank::MemoryBank& bank,
                           const RunConfig& config) {
  RefinementOutput out;
  out.id = object.id;

  const std::vector<membank::EntryPtr> neighbors =
      bank.Retrieve(object.category, RetrievalSeed(config.seed, index));
  const ot::MarginalWeights mu_a = ot::StepMarginal(object.mask);
  const corr::IcmConfig icm = MatcherConfig(config);

  std::vector<crf::CrossLink> links;
  links.reserve(neighbors.size());
  for (const membank::EntryPtr& neighbor : neighbors) {
    const MaskProb mask_s = ResampleRoi(neighbor->mask, config.roi_size, config.roi_size);
    const RoiFeature feat_s = ResampleRoi(neighbor->feature, config.roi_size, config.roi_size);
    corr::MatchResult match =
        corr::IcmMatch(object.feature, feat_s, mu_a, ot::StepMarginal(mask_s), icm);
    links.push_back({match.plan, match.combined_cost, Labeling::Threshold(mask_s),
                     config.teacher.w2});
    out.neighbor_ids.push_back(neighbor->id);
    out.matches.push_back(std::move(match));
  }

  const crf::PairwiseKernel kernel =
      crf::BuildKernel(object.rgb, config.teacher.w1, config.teacher.zeta);
  crf::MeanFieldResult refined = crf::MeanField(object.mask, kernel, links, config.teacher);
  out.pseudo_label = std::move(refined.labeling);
  out.state = std::move(refined.state);

  const mil::BagSet bags =
      mil::BuildBags(object.mask.height(), object.mask.width(), TightPixelBox(object));
  out.losses.mil = config.mil_variant == MilVariant::kBce ? mil::MilLossBce(bags, object.mask)
                                                          : mil::MilLossDice(bags, object.mask);
  out.losses.con = ConsistencyLoss(out.pseudo_label, object.mask);
  if (!out.matches.empty()) {
    const Labeling* fg = config.nce_foreground_only ? &out.pseudo_label : nullptr;
    double sum = 0.0;
    for (const corr::MatchResult& match : out.matches) {
      sum += NceLoss(match.appearance, match.plan, config.tau, fg);
    }
    out.losses.nce = sum / static_cast<double>(out.matches.size());
  }
  out.losses.total = TotalLoss(out.losses.mil, out.losses.con, out.losses.nce, config.weights);
  return out;
}

}  // namespace

std::uint64_t RetrievalSeed(std::uint64_t seed, std::size_t index) {
  return SplitMix64(seed ^ SplitMix64(static_cast<std::uint64_t>(index) + 1));
}

mil::PixelBox TightPixelBox(const RoiObject& object) {
  const int h = object.mask.height();
  const int w = object.mask.width();
  if (!object.tight_box) return {0, 0, w, h};
  const Box& b = *object.tight_box;
  mil::PixelBox px;
  px.x0 = std::clamp(static_cast<int>(std::floor(b.x0)), 0, w);
  px.y0 = std::clamp(static_cast<int>(std::floor(b.y0)), 0, h);
  px.x1 = std::clamp(static_cast<int>(std::ceil(b.x1)), 0, w);
  px.y1 = std::clamp(static_cast<int>(std::ceil(b.y1)), 0, h);
  return px;
}

std::vector<RefinementOutput> RefineBatch(const std::vector<RoiObject>& objects,
                                          membank::MemoryBank& bank,
                                          const RunConfig& config) {
  config.Validate();
  std::vector<RoiObject> resampled;
  resampled.reserve(objects.size());
  for (const RoiObject& object : objects) {
    ValidateObject(object);
    resampled.push_back(ResampleObject(object, config.roi_size));
  }

  std::vector<RefinementOutput> outputs(resampled.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t n = next++; n < resampled.size(); n = next++) {
      try {
        outputs[n] = RefineOne(resampled[n], n, bank, config);
      } catch (const Error& e) {
        std::scoped_lock lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              Error(e.code(), "object '" + resampled[n].id + "': " + e.what()));
        }
      }
    }
  };
  const int workers =
      std::min<int>(config.threads, static_cast<int>(std::max<std::size_t>(resampled.size(), 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Objects enter the bank only after every loss in the batch is computed.
  for (const RoiObject& object : resampled) bank.Push(object);
  return outputs;
}

double ConsistencyLoss(const Labeling& x, const MaskProb& m) {
  Require(x.height() == m.height() && x.width() == m.width(), ErrorCode::kDimMismatch,
          "labeling and mask shapes differ");
  Require(m.size() > 0, ErrorCode::kInvalidArgument, "empty mask");
  double sum = 0.0;
  for (int i = 0; i < m.size(); ++i) {
    const double p = std::clamp(static_cast<double>(m[i]), mil::kProbEps, 1.0 - mil::kProbEps);
    sum -= x[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / m.size();
}

double NceLoss(const CostVolume& appearance, const ot::TransportPlan& plan, double tau,
               const Labeling* foreground) {
  Require(tau > 0.0, ErrorCode::kInvalidArgument, "NonPositiveTau: tau must be positive");
  Require(plan.rows == appearance.rows && plan.cols == appearance.cols,
          ErrorCode::kDimMismatch, "plan and cost volume shapes differ");
  if (foreground != nullptr) {
    Require(foreground->size() == appearance.rows, ErrorCode::kDimMismatch,
            "foreground mask does not match the source RoI");
  }
  const std::vector<int> targets = ot::RowArgmax(plan);
  double sum = 0.0;
  int counted = 0;
  for (int i = 0; i < appearance.rows; ++i) {
    if (foreground != nullptr && !(*foreground)[i]) continue;
    double peak = appearance.at(i, 0) / tau;
    for (int k = 1; k < appearance.cols; ++k) peak = std::max(peak, appearance.at(i, k) / tau);
    double z = 0.0;
    for (int k = 0; k < appearance.cols; ++k) z += std::exp(appearance.at(i, k) / tau - peak);
    sum += peak + std::log(z) - appearance.at(i, targets[i]) / tau;
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / counted;
}

double TotalLoss(double l_mil, double l_con, double l_nce, const LossWeights& weights) {
  return weights.alpha_mil * l_mil + weights.alpha_con * l_con + weights.alpha_nce * l_nce;
}

ParamVector EmaUpdate(const ParamVector& teacher, const ParamVector& student, double momentum) {
  Require(teacher.values.size() == student.values.size(), ErrorCode::kLengthMismatch,
          "teacher and student parameter counts differ");
  Require(momentum >= 0.0 && momentum <= 1.0, ErrorCode::kOutOfRange,
          "momentum outside [0, 1]");
  ParamVector out;
  out.values.resize(teacher.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = momentum * teacher.values[i] + (1.0 - momentum) * student.values[i];
  }
  out.version = teacher.version + 1;
  return out;
}

}  // namespace discobox::teacher
