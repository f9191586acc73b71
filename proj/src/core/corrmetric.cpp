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

#include "core/corrmetric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "core/error.hpp"
#include "json.hpp"

namespace discobox::metric {
namespace {

using nlohmann::json;

bool Within(const Point& p, const Point& g, double diagonal, double alpha) {
  return std::hypot(p.x - g.x, p.y - g.y) / diagonal <= alpha;
}

Box ParseBox(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    Fail(ErrorCode::kParseError, where + ": box must be [x0, y0, x1, y1]");
  }
  return Box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Point ParsePoint(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) Fail(ErrorCode::kParseError, where + ": point must be [x, y]");
  return Point{j[0].get<double>(), j[1].get<double>()};
}

std::string CategoryText(const json& j) {
  return j.is_string() ? j.get<std::string>() : j.dump();
}

json BoxJson(const Box& b) { return json::array({b.x0, b.y0, b.x1, b.y1}); }

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

template <typename Fn>
auto Parsing(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

double OrientationGap(double a, double b) {
  const double d = std::fmod(std::fabs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

double BoxIou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void ValidateImages(const std::vector<AnnotatedImage>& images) {
  for (const AnnotatedImage& image : images) {
    for (const AnnotatedObject& object : image.objects) {
      const std::string who = "image '" + image.id + "'";
      if (!object.box.valid()) Fail(ErrorCode::kInvalidArgument, who + ": degenerate box");
      if (!std::isfinite(object.orientation)) {
        Fail(ErrorCode::kInvalidArgument, who + ": non-finite orientation");
      }
      for (const Keypoint& kp : object.keypoints) {
        if (!(kp.xy.x >= 0 && kp.xy.x <= image.width && kp.xy.y >= 0 && kp.xy.y <= image.height)) {
          Fail(ErrorCode::kOutOfRange, who + ": keypoint '" + kp.name + "' outside the image");
        }
      }
    }
  }
}

std::vector<GroundTruthPair> GeneratePairs(const std::vector<AnnotatedImage>& images) {
  std::vector<GroundTruthPair> pairs;
  for (int si = 0; si < static_cast<int>(images.size()); ++si) {
    for (int ti = si + 1; ti < static_cast<int>(images.size()); ++ti) {
      const auto& src_objects = images[si].objects;
      const auto& tgt_objects = images[ti].objects;
      for (int so = 0; so < static_cast<int>(src_objects.size()); ++so) {
        for (int to = 0; to < static_cast<int>(tgt_objects.size()); ++to) {
          const AnnotatedObject& s = src_objects[so];
          const AnnotatedObject& t = tgt_objects[to];
          if (s.category != t.category) continue;
          if (OrientationGap(s.orientation, t.orientation) > kMaxOrientationGap) continue;
          GroundTruthPair pair{si, so, ti, to, {}};
          for (const Keypoint& ks : s.keypoints) {
            if (!ks.visible) continue;
            const auto kt = std::find_if(t.keypoints.begin(), t.keypoints.end(),
                                         [&](const Keypoint& k) { return k.name == ks.name; });
            if (kt != t.keypoints.end() && kt->visible) pair.keypoints.emplace_back(ks.xy, kt->xy);
          }
          if (!pair.keypoints.empty()) pairs.push_back(std::move(pair));
        }
      }
    }
  }
  return pairs;
}

ScoredPrediction ScorePrediction(const CorrespondencePrediction& pred,
                                 const GroundTruthPair& pair,
                                 const std::vector<AnnotatedImage>& images,
                                 double alpha) {
  Require(alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be positive");
  const double ds = images[pair.source_image].objects[pair.source_object].box.diagonal();
  const double dt = images[pair.target_image].objects[pair.target_object].box.diagonal();
  int near_source = 0;
  int hits = 0;
  for (const auto& [gs, gt] : pair.keypoints) {
    if (!Within(pred.source, gs, ds, alpha)) continue;
    ++near_source;
    if (Within(pred.target, gt, dt, alpha)) ++hits;
  }
  ScoredPrediction out;
  out.confidence = pred.confidence;
  if (near_source == 0) {
    out.fn = 1;
    return out;
  }
  out.tp = static_cast<double>(hits) / near_source;
  out.fp = static_cast<double>(near_source - hits) / near_source;
  return out;
}

double AveragePrecisionAt(const std::vector<ScoredPrediction>& scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].confidence > scored[b].confidence;
  });
  double positives = 0.0;
  for (const ScoredPrediction& s : scored) positives += s.tp + s.fn;
  if (positives == 0.0) return 0.0;

  std::vector<double> precision;
  std::vector<double> recall;
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t idx : order) {
    tp += scored[idx].tp;
    fp += scored[idx].fp;
    precision.push_back(tp + fp > 0.0 ? tp / (tp + fp) : 0.0);
    recall.push_back(tp / positives);
  }
  for (std::size_t k = precision.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

ApResult AveragePrecision(const std::vector<std::vector<ScoredPrediction>>& scored,
                          const std::vector<double>& alphas) {
  Require(scored.size() == alphas.size(), ErrorCode::kLengthMismatch,
          "one scored list per alpha is required");
  ApResult out;
  out.alphas = alphas;
  out.empty_warning = scored.empty() || scored.front().empty();
  for (const auto& list : scored) out.ap.push_back(AveragePrecisionAt(list));
  double sum = 0.0;
  for (double v : out.ap) sum += v;
  out.mean_ap = out.ap.empty() ? 0.0 : sum / static_cast<double>(out.ap.size());
  return out;
}

Evaluation Evaluate(const EvaluationInput& input, const std::vector<double>& alphas) {
  ValidateImages(input.images);
  const std::vector<GroundTruthPair> pairs = GeneratePairs(input.images);
  std::map<std::string, int> image_index;
  for (int i = 0; i < static_cast<int>(input.images.size()); ++i) {
    image_index.emplace(input.images[i].id, i);
  }

  Evaluation eval;
  eval.predictions_total = static_cast<int>(input.predictions.size());
  std::vector<std::vector<ScoredPrediction>> scored(alphas.size());
  for (const CorrespondencePrediction& pred : input.predictions) {
    const auto si = image_index.find(pred.source_image);
    const auto ti = image_index.find(pred.target_image);
    // Best same-category object pair by summed box IoU, both sides >= 0.5.
    int best_so = -1;
    int best_to = -1;
    double best = -1.0;
    if (si != image_index.end() && ti != image_index.end() && si->second < ti->second) {
      const auto& src = input.images[si->second].objects;
      const auto& tgt = input.images[ti->second].objects;
      for (int so = 0; so < static_cast<int>(src.size()); ++so) {
        if (src[so].category != pred.category) continue;
        const double iou_s = BoxIou(src[so].box, pred.source_box);
        if (iou_s < kBoxMatchIou) continue;
        for (int to = 0; to < static_cast<int>(tgt.size()); ++to) {
          if (tgt[to].category != pred.category) continue;
          const double iou_t = BoxIou(tgt[to].box, pred.target_box);
          if (iou_t < kBoxMatchIou) continue;
          if (iou_s + iou_t > best) {
            best = iou_s + iou_t;
            best_so = so;
            best_to = to;
          }
        }
      }
    }
    if (best_so < 0) {
      ++eval.predictions_unmatched;
      for (auto& list : scored) list.push_back({pred.confidence, 0.0, 0.0, 1});
      continue;
    }
    const auto pair = std::find_if(pairs.begin(), pairs.end(), [&](const GroundTruthPair& p) {
      return p.source_image == si->second && p.source_object == best_so &&
             p.target_image == ti->second && p.target_object == best_to;
    });
    if (pair == pairs.end()) {
      ++eval.predictions_ignored;
      continue;
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      scored[a].push_back(ScorePrediction(pred, *pair, input.images, alphas[a]));
    }
  }
  eval.predictions_scored = eval.predictions_total - eval.predictions_ignored;
  eval.result = AveragePrecision(scored, alphas);
  return eval;
}

std::vector<AnnotatedImage> ParseAnnotations(std::string_view json_text) {
  return Parsing("annotations", [&] {
    const json doc = json::parse(json_text);
    const json& list = doc.is_array() ? doc : doc.at("images");
    std::vector<AnnotatedImage> images;
    for (const json& ji : list) {
      AnnotatedImage image;
      image.id = ji.at("id").is_string() ? ji.at("id").get<std::string>() : ji.at("id").dump();
      image.width = ji.at("width").get<double>();
      image.height = ji.at("height").get<double>();
      for (const json& jo : ji.value("objects", json::array())) {
        AnnotatedObject object;
        object.image_id = image.id;
        object.category = CategoryText(jo.at("category"));
        object.box = ParseBox(jo.at("box"), "image '" + image.id + "'");
        object.orientation = jo.value("orientation", 0.0);
        for (const json& jk : jo.value("keypoints", json::array())) {
          Keypoint kp;
          kp.name = jk.at("name").get<std::string>();
          kp.xy = Point{jk.at("x").get<double>(), jk.at("y").get<double>()};
          kp.visible = jk.value("visible", true);
          object.keypoints.push_back(std::move(kp));
        }
        image.objects.push_back(std::move(object));
      }
      images.push_back(std::move(image));
    }
    return images;
  });
}

std::vector<CorrespondencePrediction> ParsePredictions(std::string_view json_text) {
  return Parsing("predictions", [&] {
    const json doc = json::parse(json_text);
    const json& list = doc.is_array() ? doc : doc.at("predictions");
    std::vector<CorrespondencePrediction> predictions;
    for (const json& jp : list) {
      CorrespondencePrediction p;
      p.source_image = CategoryText(jp.at("source_image"));
      p.target_image = CategoryText(jp.at("target_image"));
      p.category = CategoryText(jp.at("category"));
      p.source = ParsePoint(jp.at("src_xy"), "src_xy");
      p.target = ParsePoint(jp.at("tgt_xy"), "tgt_xy");
      p.source_box = ParseBox(jp.at("src_box"), "src_box");
      p.target_box = ParseBox(jp.at("tgt_box"), "tgt_box");
      p.confidence = jp.at("confidence").get<double>();
      if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
        Fail(ErrorCode::kParseError, "prediction confidence outside [0, 1]");
      }
      predictions.push_back(std::move(p));
    }
    return predictions;
  });
}

std::string AnnotationsToJson(const std::vector<AnnotatedImage>& images) {
  json list = json::array();
  for (const AnnotatedImage& image : images) {
    json objects = json::array();
    for (const AnnotatedObject& o : image.objects) {
      json kps = json::array();
      for (const Keypoint& k : o.keypoints) {
        kps.push_back({{"name", k.name}, {"x", k.xy.x}, {"y", k.xy.y}, {"visible", k.visible}});
      }
      objects.push_back({{"category", o.category},
                         {"box", BoxJson(o.box)},
                         {"orientation", o.orientation},
                         {"keypoints", std::move(kps)}});
    }
    list.push_back({{"id", image.id},
                    {"width", image.width},
                    {"height", image.height},
                    {"objects", std::move(objects)}});
  }
  return json{{"schema_version", kReportSchemaVersion}, {"images", std::move(list)}}.dump(1) + "\n";
}

std::string PredictionsToJson(const std::vector<CorrespondencePrediction>& predictions) {
  json list = json::array();
  for (const CorrespondencePrediction& p : predictions) {
    list.push_back({{"source_image", p.source_image},
                    {"target_image", p.target_image},
                    {"category", p.category},
                    {"src_xy", {p.source.x, p.source.y}},
                    {"tgt_xy", {p.target.x, p.target.y}},
                    {"src_box", BoxJson(p.source_box)},
                    {"tgt_box", BoxJson(p.target_box)},
                    {"confidence", p.confidence}});
  }
  return json{{"schema_version", kReportSchemaVersion}, {"predictions", std::move(list)}}.dump(1) +
         "\n";
}

std::string ReportToJson(const Evaluation& evaluation) {
  const ApResult& r = evaluation.result;
  json per_alpha = json::array();
  for (std::size_t a = 0; a < r.alphas.size(); ++a) {
    per_alpha.push_back({{"alpha", r.alphas[a]}, {"ap", r.ap[a]}, {"ap_percent", Percent(r.ap[a])}});
  }
  const json report = {{"schema_version", kReportSchemaVersion},
                       {"per_alpha", std::move(per_alpha)},
                       {"mean_ap", r.mean_ap},
                       {"mean_ap_percent", Percent(r.mean_ap)},
                       {"empty_prediction_warning", r.empty_warning},
                       {"predictions_total", evaluation.predictions_total},
                       {"predictions_scored", evaluation.predictions_scored},
                       {"predictions_ignored", evaluation.predictions_ignored},
                       {"predictions_unmatched", evaluation.predictions_unmatched}};
  return report.dump(2) + "\n";
}

}  // namespace discobox::metric
