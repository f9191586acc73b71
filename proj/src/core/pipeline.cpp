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

#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "core/correspondence.hpp"
#include "core/error.hpp"
#include "json.hpp"

namespace discobox {
namespace {

using nlohmann::json;

constexpr std::string_view kRequiredPrefixes[] = {"rgb/", "feat/", "mask/", "box/", "cat/"};
constexpr std::string_view kKnownPrefixes[] = {"rgb/", "feat/", "mask/", "box/",
                                               "cat/", "conf/", "tight/"};

std::string Named(std::string_view prefix, const std::string& id) {
  return std::string(prefix) + id;
}

MaskProb ReadMask(const TensorBundle& bundle, const std::string& name) {
  const BundleEntry* entry = bundle.Find(name);
  if (entry == nullptr) Fail(ErrorCode::kMissingEntry, "missing " + name);
  if (entry->shape.size() != 2) Fail(ErrorCode::kDimMismatch, name + ": expected shape [H, W]");
  std::vector<float> values = bundle.ReadF32(name);
  if (entry->dtype == DType::kU8) {
    for (float& v : values) v /= 255.0f;
  }
  const int h = static_cast<int>(entry->shape[0]);
  const int w = static_cast<int>(entry->shape[1]);
  try {
    return MaskProb(Grid2D(h, w, std::move(values)));
  } catch (const Error& e) {
    Fail(e.code(), name + ": " + e.what());
  }
}

std::vector<float> ReadFixed(const TensorBundle& bundle, const std::string& name,
                             std::size_t count) {
  std::vector<float> values = bundle.ReadF32(name);
  if (values.size() != count) {
    Fail(ErrorCode::kDimMismatch, name + ": expected " + std::to_string(count) + " values");
  }
  return values;
}

Box ReadBox(const TensorBundle& bundle, const std::string& name) {
  const std::vector<float> v = ReadFixed(bundle, name, 4);
  return Box{v[0], v[1], v[2], v[3]};
}

void AddGrid(TensorBundle& bundle, const std::string& name, const Grid2D& grid) {
  bundle.AddF32(name, {grid.height(), grid.width()}, grid.values());
}

void AddTensor(TensorBundle& bundle, const std::string& name, const RoiFeature& t) {
  bundle.AddF32(name, {t.channels(), t.height(), t.width()}, t.values());
}

void AddJson(TensorBundle& bundle, const std::string& name, const json& value) {
  const std::string text = value.dump();
  bundle.AddU8(name, {static_cast<std::int64_t>(text.size())},
               {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string SingleId(const TensorBundle& bundle) {
  std::vector<std::string> ids;
  for (const BundleEntry& e : bundle.entries()) {
    if (e.name.starts_with("feat/")) ids.push_back(e.name.substr(5));
  }
  if (ids.size() != 1) {
    Fail(ErrorCode::kInvalidArgument,
         "match bundle must hold exactly one feat/<id> entry, found " + std::to_string(ids.size()));
  }
  return ids.front();
}

}  // namespace

std::vector<RoiObject> ObjectsFromBundle(const TensorBundle& bundle) {
  std::vector<std::string> ids;
  for (const BundleEntry& e : bundle.entries()) {
    if (e.name.starts_with("rgb/")) ids.push_back(e.name.substr(4));
  }
  // Arrays for an id without rgb/<id> mean the object is incomplete.
  for (const BundleEntry& e : bundle.entries()) {
    for (std::string_view prefix : kKnownPrefixes) {
      if (!e.name.starts_with(prefix)) continue;
      const std::string id = e.name.substr(prefix.size());
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        Fail(ErrorCode::kMissingEntry, "object '" + id + "': missing rgb/" + id);
      }
    }
  }

  std::vector<RoiObject> objects;
  objects.reserve(ids.size());
  for (const std::string& id : ids) {
    for (std::string_view prefix : kRequiredPrefixes) {
      if (!bundle.Contains(Named(prefix, id))) {
        Fail(ErrorCode::kMissingEntry, "object '" + id + "': missing " + Named(prefix, id));
      }
    }
    try {
      RoiObject o;
      o.id = id;
      o.rgb = bundle.ReadTensor(Named("rgb/", id));
      o.feature = bundle.ReadTensor(Named("feat/", id));
      o.mask = ReadMask(bundle, Named("mask/", id));
      o.box = ReadBox(bundle, Named("box/", id));
      const float category = ReadFixed(bundle, Named("cat/", id), 1)[0];
      if (category != std::floor(category) || std::fabs(category) > 1e6f) {
        Fail(ErrorCode::kInvalidArgument, "category must be an integer");
      }
      o.category = static_cast<int>(category);
      if (bundle.Contains(Named("conf/", id))) {
        o.confidence = ReadFixed(bundle, Named("conf/", id), 1)[0];
      }
      if (bundle.Contains(Named("tight/", id))) o.tight_box = ReadBox(bundle, Named("tight/", id));
      o.area = o.box.area();
      ValidateObject(o);
      objects.push_back(std::move(o));
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.starts_with("object '")) throw;
      Fail(e.code(), "object '" + id + "': " + what);
    }
  }
  return objects;
}

TensorBundle ObjectsToBundle(const std::vector<RoiObject>& objects) {
  TensorBundle bundle;
  for (const RoiObject& o : objects) {
    AddTensor(bundle, "rgb/" + o.id, o.rgb);
    AddTensor(bundle, "feat/" + o.id, o.feature);
    AddGrid(bundle, "mask/" + o.id, o.mask.grid());
    const float box[4] = {static_cast<float>(o.box.x0), static_cast<float>(o.box.y0),
                          static_cast<float>(o.box.x1), static_cast<float>(o.box.y1)};
    bundle.AddF32("box/" + o.id, {4}, box);
    const float category = static_cast<float>(o.category);
    bundle.AddF32("cat/" + o.id, {1}, {&category, 1});
    const float confidence = static_cast<float>(o.confidence);
    bundle.AddF32("conf/" + o.id, {1}, {&confidence, 1});
    if (o.tight_box) {
      const Box& t = *o.tight_box;
      const float tight[4] = {static_cast<float>(t.x0), static_cast<float>(t.y0),
                              static_cast<float>(t.x1), static_cast<float>(t.y1)};
      bundle.AddF32("tight/" + o.id, {4}, tight);
    }
  }
  return bundle;
}

TensorBundle RefineOutputBundle(const std::vector<teacher::RefinementOutput>& outputs) {
  TensorBundle bundle;
  json report = json::array();
  for (const teacher::RefinementOutput& out : outputs) {
    const Labeling& label = out.pseudo_label;
    std::vector<std::uint8_t> bits(label.size());
    for (int i = 0; i < label.size(); ++i) bits[i] = static_cast<std::uint8_t>(label[i]);
    bundle.AddU8("label/" + out.id, {label.height(), label.width()}, bits);
    const float losses[4] = {static_cast<float>(out.losses.mil), static_cast<float>(out.losses.con),
                             static_cast<float>(out.losses.nce),
                             static_cast<float>(out.losses.total)};
    bundle.AddF32("losses/" + out.id, {4}, losses);
    report.push_back({{"id", out.id},
                      {"neighbors", out.neighbor_ids},
                      {"mf_iterations", out.state.iteration},
                      {"mf_converged", out.state.converged},
                      {"foreground_pixels", label.CountForeground()},
                      {"loss_mil", out.losses.mil},
                      {"loss_con", out.losses.con},
                      {"loss_nce", out.losses.nce},
                      {"loss_total", out.losses.total}});
  }
  AddJson(bundle, "report", {{"schema_version", kReportSchemaVersion}, {"objects", report}});
  return bundle;
}

TensorBundle RunRefine(const TensorBundle& input, membank::MemoryBank& bank,
                       const RunConfig& config) {
  const std::vector<RoiObject> objects = ObjectsFromBundle(input);
  return RefineOutputBundle(teacher::RefineBatch(objects, bank, config));
}

TensorBundle RunMatch(const TensorBundle& a, const TensorBundle& b, const RunConfig& config) {
  config.Validate();
  const std::string id_a = SingleId(a);
  const std::string id_b = SingleId(b);
  const RoiFeature fa = a.ReadTensor("feat/" + id_a);
  const RoiFeature fb = b.ReadTensor("feat/" + id_b);
  Require(fa.pixels() > 0 && fb.pixels() > 0, ErrorCode::kInvalidArgument, "empty RoI");
  auto mask_of = [](const TensorBundle& bundle, const std::string& id, const RoiFeature& f) {
    const std::string name = "mask/" + id;
    if (!bundle.Contains(name)) return MaskProb(Grid2D::Filled(f.height(), f.width(), 1.0f));
    MaskProb m = ReadMask(bundle, name);
    Require(m.height() == f.height() && m.width() == f.width(), ErrorCode::kDimMismatch,
            "mask and feature resolutions differ");
    return m;
  };
  const MaskProb ma = mask_of(a, id_a, fa);
  const MaskProb mb = mask_of(b, id_b, fb);

  corr::IcmConfig icm;
  icm.icm_iters = config.icm_iters;
  icm.gamma = config.teacher.gamma;
  icm.sinkhorn = config.sinkhorn;
  const corr::MatchResult match =
      corr::IcmMatch(fa, fb, ot::StepMarginal(ma), ot::StepMarginal(mb), icm);

  const ot::TransportPlan& plan = match.plan;
  std::vector<float> plan_values(plan.values.begin(), plan.values.end());
  std::vector<float> argmax(plan.rows);
  std::vector<float> confidence(plan.rows);
  for (int i = 0; i < plan.rows; ++i) {
    argmax[i] = static_cast<float>(match.argmax_targets[i]);
    confidence[i] = static_cast<float>(plan.at(i, match.argmax_targets[i]));
  }
  TensorBundle out;
  out.AddF32("plan", {plan.rows, plan.cols}, plan_values);
  out.AddF32("argmax", {fa.height(), fa.width()}, argmax);
  out.AddF32("confidence", {fa.height(), fa.width()}, confidence);
  AddJson(out, "report",
          {{"schema_version", kReportSchemaVersion},
           {"source", id_a},
           {"target", id_b},
           {"solves", match.iterations},
           {"sinkhorn_iterations", plan.iterations_run},
           {"converged", plan.converged},
           {"max_violation", plan.max_violation}});
  return out;
}

}  // namespace discobox
