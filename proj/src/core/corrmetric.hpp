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

// Multi-object keypoint correspondence benchmark: ground-truth pair
// generation, fractional TP/FP/FN scoring and AP at box-relative
// thresholds.

#ifndef DISCOBOX_CORE_CORRMETRIC_HPP_
#define DISCOBOX_CORE_CORRMETRIC_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensors.hpp"

namespace discobox::metric {

inline constexpr std::array<double, 5> kDefaultAlphas = {0.0075, 0.01, 0.015, 0.02, 0.03};
inline constexpr double kMaxOrientationGap = 60.0;
inline constexpr double kBoxMatchIou = 0.5;
inline constexpr int kReportSchemaVersion = 1;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Keypoint {
  std::string name;
  Point xy;
  bool visible = true;
};

struct AnnotatedObject {
  std::string image_id;
  std::string category;
  Box box;
  double orientation = 0.0;  // degrees
  std::vector<Keypoint> keypoints;
};

struct AnnotatedImage {
  std::string id;
  double width = 0.0;
  double height = 0.0;
  std::vector<AnnotatedObject> objects;
};

struct GroundTruthPair {
  int source_image = 0;  // indices into the image list
  int source_object = 0;
  int target_image = 0;
  int target_object = 0;
  std::vector<std::pair<Point, Point>> keypoints;  // (g^s_j, g^t_j)
};

struct CorrespondencePrediction {
  std::string source_image;
  std::string target_image;
  std::string category;
  Box source_box;
  Box target_box;
  Point source;
  Point target;
  double confidence = 0.0;
};

struct ScoredPrediction {
  double confidence = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  int fn = 0;
};

struct ApResult {
  std::vector<double> alphas;
  std::vector<double> ap;  // one per alpha
  double mean_ap = 0.0;
  bool empty_warning = false;
};

// Circular difference in degrees, in [0, 180].
double OrientationGap(double a, double b);

// Throws kInvalidArgument / kOutOfRange for keypoints outside the image,
// non-finite orientation or a degenerate box.
void ValidateImages(const std::vector<AnnotatedImage>& images);

// Every same-category object pair across two different images. The image
// listed first is the source. Pairs over the orientation gap or without a
// keypoint visible on both sides are dropped.
std::vector<GroundTruthPair> GeneratePairs(const std::vector<AnnotatedImage>& images);

// Distances are divided by the box diagonal of their own side.
ScoredPrediction ScorePrediction(const CorrespondencePrediction& pred,
                                 const GroundTruthPair& pair,
                                 const std::vector<AnnotatedImage>& images,
                                 double alpha);

// Per-alpha AP over predictions scored at that alpha. scored[a] holds the
// list for alphas[a].
ApResult AveragePrecision(const std::vector<std::vector<ScoredPrediction>>& scored,
                          const std::vector<double>& alphas);
double AveragePrecisionAt(const std::vector<ScoredPrediction>& scored);

struct EvaluationInput {
  std::vector<AnnotatedImage> images;
  std::vector<CorrespondencePrediction> predictions;
};

struct Evaluation {
  ApResult result;
  int predictions_total = 0;
  int predictions_scored = 0;
  int predictions_ignored = 0;  // fell on a filtered object pair
  int predictions_unmatched = 0;
};

// Assigns each prediction to the ground-truth pair whose boxes overlap its
// boxes best (IoU >= 0.5 on both sides), then scores and ranks.
Evaluation Evaluate(const EvaluationInput& input,
                    const std::vector<double>& alphas = {kDefaultAlphas.begin(),
                                                          kDefaultAlphas.end()});

double BoxIou(const Box& a, const Box& b);

// JSON text I/O. Errors: kParseError.
std::vector<AnnotatedImage> ParseAnnotations(std::string_view json_text);
std::vector<CorrespondencePrediction> ParsePredictions(std::string_view json_text);
std::string AnnotationsToJson(const std::vector<AnnotatedImage>& images);
std::string PredictionsToJson(const std::vector<CorrespondencePrediction>& predictions);
std::string ReportToJson(const Evaluation& evaluation);

}  // namespace discobox::metric

#endif  // DISCOBOX_CORE_CORRMETRIC_HPP_
