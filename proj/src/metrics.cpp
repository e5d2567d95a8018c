/*
 * tagtrack : conditioned implicit neural representations for tagged-MRI motion tracking
 *
 * Copyright 2026 the tagtrack authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>

#include "tagtrack/core/coords.hpp"
#include "tagtrack/diffnet/network.hpp"
#include "tagtrack/strain/metrics.hpp"

namespace tagtrack::strain {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void check_topology(const LandmarkGrid& grid, int ed_frame, int es_frame) {
  if (grid.rings() < 2 || grid.spokes() < 3)
    throw DataError("strain: grid must have at least 2 rings and 3 spokes");
  if (ed_frame < 0 || ed_frame >= grid.frame_count() || es_frame < 0 ||
      es_frame >= grid.frame_count())
    throw DataError("strain: frame index out of range");
}

}  // namespace

double local_strain(double l_ed, double l_es) {
  if (!(l_ed > 0.0)) throw DataError("local_strain: L_ED must be positive");
  return (l_es - l_ed) / l_ed;
}

StrainValue gcs(const LandmarkGrid& grid, int ed_frame, int es_frame) {
  check_topology(grid, ed_frame, es_frame);
  const auto& ed = grid.frame(ed_frame);
  const auto& es = grid.frame(es_frame);
  const int nr = grid.rings(), nc = grid.spokes();
  StrainValue out;
  out.per_pair.reserve(static_cast<std::size_t>(nr) * nc);
  for (int j = 0; j < nr; ++j)
    for (int k = 0; k < nc; ++k) {
      const int p = j * nc + k;
      const int q = j * nc + (k + 1) % nc;
      out.per_pair.push_back(local_strain(dist(ed[p], ed[q]), dist(es[p], es[q])));
    }
  double acc = 0.0;
  for (double v : out.per_pair) acc += v;
  out.mean = acc / static_cast<double>(out.per_pair.size());
  return out;
}

StrainValue grs(const LandmarkGrid& grid, int ed_frame, int es_frame) {
  check_topology(grid, ed_frame, es_frame);
  const auto& ed = grid.frame(ed_frame);
  const auto& es = grid.frame(es_frame);
  const int nr = grid.rings(), nc = grid.spokes();
  StrainValue out;
  out.per_pair.reserve(static_cast<std::size_t>(nr - 1) * nc);
  for (int j = 0; j + 1 < nr; ++j)
    for (int k = 0; k < nc; ++k) {
      const int p = j * nc + k;
      const int q = (j + 1) * nc + k;
      out.per_pair.push_back(local_strain(dist(ed[p], ed[q]), dist(es[p], es[q])));
    }
  double acc = 0.0;
  for (double v : out.per_pair) acc += v;
  out.mean = acc / static_cast<double>(out.per_pair.size());
  return out;
}

double point_rmse(const LandmarkGrid& pred, const LandmarkGrid& ref, double spacing_mm) {
  if (pred.frame_count() != ref.frame_count() || pred.rings() != ref.rings() ||
      pred.spokes() != ref.spokes())
    throw DataError("point_rmse: shape mismatch");
  if (pred.frame_count() < 2) throw DataError("point_rmse: need at least 2 frames");
  double acc = 0.0;
  std::size_t count = 0;
  for (int t = 1; t < pred.frame_count(); ++t) {
    const auto& a = pred.frame(t);
    const auto& b = ref.frame(t);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double dx = a[i].x - b[i].x;
      const double dy = a[i].y - b[i].y;
      acc += dx * dx + dy * dy;
      ++count;
    }
  }
  return std::sqrt(acc / static_cast<double>(count)) * spacing_mm;
}

AgreementStats agreement(const std::vector<double>& pred, const std::vector<double>& ref) {
  if (pred.size() != ref.size()) throw DataError("agreement: case list length mismatch");
  if (pred.empty()) throw DataError("agreement: empty case lists");
  AgreementStats out;
  out.n_cases = static_cast<int>(pred.size());
  double sum = 0.0, sum_abs = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = (pred[i] - ref[i]) * 100.0;
    sum += d;
    sum_abs += std::abs(d);
  }
  out.bias = sum / out.n_cases;
  out.error = sum_abs / out.n_cases;
  double var = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = (pred[i] - ref[i]) * 100.0 - out.bias;
    var += d * d;
  }
  out.sd = std::sqrt(var / out.n_cases);
  return out;
}

int end_systole_index(const LandmarkGrid& landmarks) {
  if (landmarks.frame_count() < 2) throw DataError("end_systole_index: need at least 2 frames");
  const int nc = landmarks.spokes();
  int best = 0;
  double best_len = 1e300;
  for (int t = 0; t < landmarks.frame_count(); ++t) {
    const auto& pts = landmarks.frame(t);
    double len = 0.0;
    for (int k = 0; k < nc; ++k) len += dist(pts[k], pts[(k + 1) % nc]);
    if (len < best_len) {
      best_len = len;
      best = t;
    }
  }
  return best;
}

template <typename T>
LandmarkGrid predict_landmarks(const diffnet::InrModel<T>& model, const TagFrameSeries& series,
                               const LandmarkGrid& reference) {
  if (reference.frame_count() < 1) throw DataError("predict_landmarks: empty reference grid");
  const int frames = series.frame_count();
  if (frames < 2) throw DataError("predict_landmarks: need at least 2 frames");
  const int s = series.image_size();

  const auto ed_px = reference.frame(0);
  const auto ed_norm = normalize_coords(ed_px, s);

  LandmarkGrid out(reference.rings(), reference.spokes(), {});
  out.push_frame(ed_px);  // material points: zero tracking error at ED by construction
  for (int t = 1; t < frames; ++t) {
    const auto z = diffnet::encode(model, series.frames[0], series.frames[t]);
    const auto res =
        diffnet::forward_points(model, ed_norm, normalize_time(t, frames), z, false);
    std::vector<Vec2> pts;
    pts.reserve(ed_norm.size());
    for (std::size_t i = 0; i < ed_norm.size(); ++i)
      pts.push_back(denormalize_coord(
          {ed_norm[i].x + res[i].u.x, ed_norm[i].y + res[i].u.y}, s));
    out.push_frame(std::move(pts));
  }
  return out;
}

template LandmarkGrid predict_landmarks<float>(const diffnet::InrModel<float>&,
                                               const TagFrameSeries&, const LandmarkGrid&);
template LandmarkGrid predict_landmarks<double>(const diffnet::InrModel<double>&,
                                                const TagFrameSeries&, const LandmarkGrid&);

CaseStrain evaluate_case(const std::string& case_id, const LandmarkGrid& pred,
                         const LandmarkGrid& ref, double spacing_mm) {
  CaseStrain out;
  out.case_id = case_id;
  out.es_frame = end_systole_index(ref);
  out.point_error_mm = point_rmse(pred, ref, spacing_mm);
  out.gcs_pred = gcs(pred, 0, out.es_frame).mean;
  out.gcs_ref = gcs(ref, 0, out.es_frame).mean;
  out.grs_pred = grs(pred, 0, out.es_frame).mean;
  out.grs_ref = grs(ref, 0, out.es_frame).mean;
  return out;
}

}  // namespace tagtrack::strain
