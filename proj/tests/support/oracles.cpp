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

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace discobox::oracle {

Grid2D Gen::Grid(int h, int w, double lo, double hi) {
  std::vector<float> v(static_cast<std::size_t>(h) * w);
  for (float& x : v) x = static_cast<float>(Uniform(lo, hi));
  return Grid2D(h, w, std::move(v));
}

MaskProb Gen::Mask(int h, int w) { return MaskProb(Grid(h, w, 0.0, 1.0)); }

RoiFeature Gen::Tensor(int c, int h, int w, double lo, double hi) {
  std::vector<float> v(static_cast<std::size_t>(c) * h * w);
  for (float& x : v) x = static_cast<float>(Uniform(lo, hi));
  return RoiFeature(c, h, w, std::move(v));
}

Labeling Gen::Labels(int h, int w) {
  std::vector<unsigned char> bits(static_cast<std::size_t>(h) * w);
  for (auto& b : bits) b = Coin() ? 1 : 0;
  return Labeling::FromBits(h, w, bits);
}

ot::MarginalWeights Gen::Marginal(int n, double lo, double hi) {
  std::vector<double> w(n);
  for (double& x : w) x = Uniform(lo, hi);
  return ot::MarginalWeights::FromWeights(std::move(w));
}

CostVolume Gen::Cost(int rows, int cols, double lo, double hi) {
  CostVolume c(rows, cols, VolumeKind::kCost);
  for (double& x : c.values) x = Uniform(lo, hi);
  return c;
}

ot::TransportPlan Gen::Plan(int rows, int cols) {
  ot::TransportPlan p;
  p.rows = rows;
  p.cols = cols;
  p.values.resize(static_cast<std::size_t>(rows) * cols);
  for (double& x : p.values) x = Coin(0.3) ? 0.0 : Uniform(0.0, 1.0);
  return p;
}

Matrix NaiveGeometric(const ot::TransportPlan& plan, int ha, int wa, int hb, int wb,
                      double gamma) {
  Matrix out{ha * wa, hb * wb, std::vector<double>(static_cast<std::size_t>(ha) * wa * hb * wb)};
  for (int yi = 0; yi < ha; ++yi)
    for (int xi = 0; xi < wa; ++xi)
      for (int yk = 0; yk < hb; ++yk)
        for (int xk = 0; xk < wb; ++xk) {
          double sum = 0.0;
          for (int yj = 0; yj < ha; ++yj)
            for (int xj = 0; xj < wa; ++xj)
              for (int yl = 0; yl < hb; ++yl)
                for (int xl = 0; xl < wb; ++xl) {
                  const double ddx = (xk - xi) - (xl - xj);
                  const double ddy = (yk - yi) - (yl - yj);
                  sum += std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * gamma)) *
                         plan.values[static_cast<std::size_t>(yj * wa + xj) * plan.cols + yl * wb + xl];
                }
          out.v[static_cast<std::size_t>(yi * wa + xi) * out.cols + yk * wb + xk] = sum;
        }
  return out;
}

Matrix NaiveCosine(const RoiFeature& a, const RoiFeature& b) {
  Matrix out{a.pixels(), b.pixels(), std::vector<double>(static_cast<std::size_t>(a.pixels()) * b.pixels())};
  for (int i = 0; i < a.pixels(); ++i) {
    for (int k = 0; k < b.pixels(); ++k) {
      double dot = 0, na = 0, nb = 0;
      for (int c = 0; c < a.channels(); ++c) {
        dot += double(a.at(c, i)) * b.at(c, k);
        na += double(a.at(c, i)) * a.at(c, i);
        nb += double(b.at(c, k)) * b.at(c, k);
      }
      out.v[static_cast<std::size_t>(i) * out.cols + k] =
          (na == 0 || nb == 0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
    }
  }
  return out;
}

double BruteForceAssignment(const CostVolume& cost) {
  std::vector<int> p(cost.rows);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (int i = 0; i < cost.rows; ++i) s += cost.at(i, p[i]);
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Grid2D NaiveBilinear(const Grid2D& in, int th, int tw) {
  auto coord = [](int o, int n_in, int n_out) {
    double s = (o + 0.5) * n_in / n_out - 0.5;
    if (s < 0) s = 0;
    if (s > n_in - 1) s = n_in - 1;
    return s;
  };
  std::vector<float> out(static_cast<std::size_t>(th) * tw);
  for (int y = 0; y < th; ++y) {
    for (int x = 0; x < tw; ++x) {
      const double sy = coord(y, in.height(), th);
      const double sx = coord(x, in.width(), tw);
      const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
      const int y1 = std::min(y0 + 1, in.height() - 1), x1 = std::min(x0 + 1, in.width() - 1);
      const double fy = sy - y0, fx = sx - x0;
      out[y * tw + x] = static_cast<float>(
          in.at(y0, x0) * (1 - fx) * (1 - fy) + in.at(y0, x1) * fx * (1 - fy) +
          in.at(y1, x0) * (1 - fx) * fy + in.at(y1, x1) * fx * fy);
    }
  }
  return Grid2D(th, tw, std::move(out));
}

std::vector<Pair> NaivePairs(const RoiFeature& rgb, double w1, double zeta) {
  std::vector<Pair> pairs;
  const int h = rgb.height(), w = rgb.width();
  for (int i = 0; i < h * w; ++i) {
    for (int j = i + 1; j < h * w; ++j) {
      const int dy = std::abs(i / w - j / w), dx = std::abs(i % w - j % w);
      if (dx > 1 || dy > 1) continue;
      double d2 = 0;
      for (int c = 0; c < 3; ++c) d2 += std::pow(double(rgb.at(c, i)) - rgb.at(c, j), 2);
      pairs.push_back({i, j, w1 * std::exp(-d2 / (2 * zeta * zeta))});
    }
  }
  return pairs;
}

NaiveLink ToNaive(const crf::CrossLink& link) {
  NaiveLink n;
  n.plan = {link.plan.rows, link.plan.cols, link.plan.values};
  n.cost = {link.cost.rows, link.cost.cols, link.cost.values};
  for (int k = 0; k < link.neighbor_labeling.size(); ++k) n.labels.push_back(link.neighbor_labeling[k]);
  n.weight = link.weight;
  return n;
}

double NaiveEnergy(const std::vector<int>& x, const MaskProb& mask, const std::vector<Pair>& pairs,
                   const std::vector<NaiveLink>& links) {
  double e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double phi = mask[static_cast<int>(i)] <= 0.5f ? 0.3 : 0.7;
    e += x[i] == 1 ? -std::log(phi) : -std::log(1 - phi);
  }
  for (const Pair& p : pairs) e += x[p.i] != x[p.j] ? p.w : 0.0;
  for (const NaiveLink& l : links) {
    for (int i = 0; i < l.plan.rows; ++i)
      for (int k = 0; k < l.plan.cols; ++k)
        if (x[i] != l.labels[k]) e += l.weight * l.plan(i, k) * l.cost(i, k);
  }
  return e;
}

double ExhaustiveMinEnergy(const MaskProb& mask, const std::vector<Pair>& pairs,
                           const std::vector<NaiveLink>& links) {
  const int n = mask.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> x(n);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i) x[i] = (bits >> i) & 1;
    best = std::min(best, NaiveEnergy(x, mask, pairs, links));
  }
  return best;
}

std::vector<NaiveBag> NaiveBags(int h, int w, int x0, int y0, int x1, int y1) {
  auto inside = [&](int y, int x) { return x >= x0 && x < x1 && y >= y0 && y < y1; };
  std::vector<NaiveBag> bags;
  for (int y = 0; y < h; ++y) {
    NaiveBag bag{false, {}};
    for (int x = 0; x < w; ++x) bag.positive = bag.positive || inside(y, x);
    for (int x = 0; x < w; ++x)
      if (!bag.positive || inside(y, x)) bag.pixels.push_back(y * w + x);
    bags.push_back(bag);
  }
  for (int x = 0; x < w; ++x) {
    NaiveBag bag{false, {}};
    for (int y = 0; y < h; ++y) bag.positive = bag.positive || inside(y, x);
    for (int y = 0; y < h; ++y)
      if (!bag.positive || inside(y, x)) bag.pixels.push_back(y * w + x);
    bags.push_back(bag);
  }
  return bags;
}

metric::ScoredPrediction NaiveScore(const metric::CorrespondencePrediction& pred,
                                    const std::vector<std::pair<metric::Point, metric::Point>>& gt,
                                    double diag_source, double diag_target, double alpha) {
  auto near = [&](const metric::Point& p, const metric::Point& g, double diag) {
    return std::sqrt((p.x - g.x) * (p.x - g.x) + (p.y - g.y) * (p.y - g.y)) / diag <= alpha ? 1 : 0;
  };
  int src = 0, both = 0, miss = 0;
  for (const auto& [gs, gt_t] : gt) {
    src += near(pred.source, gs, diag_source);
    both += near(pred.source, gs, diag_source) * near(pred.target, gt_t, diag_target);
    miss += near(pred.source, gs, diag_source) * (1 - near(pred.target, gt_t, diag_target));
  }
  const double denom = src + (src == 0 ? 1 : 0);
  return {pred.confidence, both / denom, miss / denom, src == 0 ? 1 : 0};
}

double NaiveAp(const std::vector<metric::ScoredPrediction>& scored) {
  // Insertion sort, stable, by descending confidence.
  std::vector<metric::ScoredPrediction> s;
  for (const auto& p : scored) {
    auto pos = s.end();
    while (pos != s.begin() && (pos - 1)->confidence < p.confidence) --pos;
    s.insert(pos, p);
  }
  double total = 0;
  for (const auto& p : s) total += p.tp + p.fn;
  if (total == 0) return 0;
  const std::size_t n = s.size();
  std::vector<double> prec(n), rec(n);
  double ctp = 0, cfp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ctp += s[k].tp;
    cfp += s[k].fp;
    prec[k] = (ctp + cfp) == 0 ? 0 : ctp / (ctp + cfp);
    rec[k] = ctp / total;
  }
  double ap = 0, last = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double env = 0;
    for (std::size_t j = k; j < n; ++j) env = std::max(env, prec[j]);
    ap += (rec[k] - last) * env;
    last = rec[k];
  }
  return ap;
}

MetricExpectation ExpectedMetric(const synth::MetricFixture& fixture,
                                 const std::vector<double>& alphas) {
  auto find = [&](const std::string& id) -> const metric::AnnotatedObject& {
    for (const auto& im : fixture.images)
      if (im.id == id) return im.objects.at(0);
    throw std::runtime_error("unknown image " + id);
  };
  MetricExpectation out;
  for (double alpha : alphas) {
    std::vector<metric::ScoredPrediction> scored;
    for (const auto& pred : fixture.predictions) {
      const auto& s = find(pred.source_image);
      const auto& t = find(pred.target_image);
      double gap = std::fabs(s.orientation - t.orientation);
      while (gap >= 360) gap -= 360;
      if (gap > 180) gap = 360 - gap;
      std::vector<std::pair<metric::Point, metric::Point>> gt;
      for (const auto& ks : s.keypoints)
        for (const auto& kt : t.keypoints)
          if (ks.name == kt.name && ks.visible && kt.visible) gt.emplace_back(ks.xy, kt.xy);
      if (gap > 60 || gt.empty()) continue;
      const double ds = std::sqrt(s.box.width() * s.box.width() + s.box.height() * s.box.height());
      const double dt = std::sqrt(t.box.width() * t.box.width() + t.box.height() * t.box.height());
      scored.push_back(NaiveScore(pred, gt, ds, dt, alpha));
    }
    out.ap.push_back(NaiveAp(scored));
  }
  double sum = 0;
  for (double a : out.ap) sum += a;
  out.mean_ap = out.ap.empty() ? 0 : sum / out.ap.size();
  return out;
}

}  // namespace discobox::oracle
