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
#include "tagtrack/synth/deformation.hpp"

namespace tagtrack::synth {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

double AnalyticDeformation::bump(double t) const {
  if (t <= 0.0) return 0.0;
  if (t <= peak_time) return 0.5 * (1.0 - std::cos(kPi * t / peak_time));
  if (t >= 1.0) return end_recovery;
  return end_recovery +
         (1.0 - end_recovery) * 0.5 * (1.0 + std::cos(kPi * (t - peak_time) / (1.0 - peak_time)));
}

Vec2 deform_point(const AnalyticDeformation& def, Vec2 x, double t) {
  const double s = def.bump(t);
  const double rx = x.x - def.center.x;
  const double ry = x.y - def.center.y;
  const double r2 = rx * rx + ry * ry;
  const double theta = std::atan2(ry, rx);

  double r_new = 0.0;
  if (def.mode == DeformationMode::incompressible) {
    const double k = def.contraction_amplitude * s;
    if (r2 < k) throw DataError("deform_point: point inside collapse radius");
    r_new = (1.0 - def.area_scale_amplitude * s) * std::sqrt(r2 - k);
  } else {
    const double r = std::sqrt(r2);
    r_new = def.epi_radius + (r - def.epi_radius) * (1.0 + def.thickening_amplitude * s);
  }

  const double theta_new = theta + def.twist_amplitude * s;
  return {def.center.x + r_new * std::cos(theta_new) + s * def.drift_amplitude.x,
          def.center.y + r_new * std::sin(theta_new) + s * def.drift_amplitude.y};
}

Vec2 inverse_deform_point(const AnalyticDeformation& def, Vec2 xp, double t) {
  const double s = def.bump(t);
  const double rx = xp.x - def.center.x - s * def.drift_amplitude.x;
  const double ry = xp.y - def.center.y - s * def.drift_amplitude.y;
  const double r_def = std::hypot(rx, ry);
  const double theta = std::atan2(ry, rx) - def.twist_amplitude * s;

  double r_orig = 0.0;
  if (def.mode == DeformationMode::incompressible) {
    const double g = 1.0 - def.area_scale_amplitude * s;
    const double ru = r_def / g;
    r_orig = std::sqrt(ru * ru + def.contraction_amplitude * s);
  } else {
    r_orig = def.epi_radius + (r_def - def.epi_radius) / (1.0 + def.thickening_amplitude * s);
  }

  return {def.center.x + r_orig * std::cos(theta), def.center.y + r_orig * std::sin(theta)};
}

std::array<double, 4> deform_jacobian(const AnalyticDeformation& def, Vec2 x, double t) {
  const double s = def.bump(t);
  const double rx = x.x - def.center.x;
  const double ry = x.y - def.center.y;
  const double r = std::hypot(rx, ry);
  if (!(r > 0.0)) throw DataError("deform_jacobian: undefined at the center");

  double radial = 0.0, circ = 0.0;  // dR/dr and R/r
  if (def.mode == DeformationMode::incompressible) {
    const double k = def.contraction_amplitude * s;
    if (r * r < k) throw DataError("deform_jacobian: point inside collapse radius");
    const double g = 1.0 - def.area_scale_amplitude * s;
    const double root = std::sqrt(r * r - k);
    radial = g * r / root;
    circ = g * root / r;
  } else {
    const double w = 1.0 + def.thickening_amplitude * s;
    radial = w;
    circ = (def.epi_radius + (r - def.epi_radius) * w) / r;
  }

  const double theta = std::atan2(ry, rx);
  const double tau = def.twist_amplitude * s;
  const double c0 = std::cos(theta), s0 = std::sin(theta);
  const double c1 = std::cos(theta + tau), s1 = std::sin(theta + tau);
  // Rot(theta+tau) * diag(radial, circ) * Rot(-theta)
  return {c1 * radial * c0 + s1 * circ * s0, c1 * radial * s0 - s1 * circ * c0,
          s1 * radial * c0 - c1 * circ * s0, s1 * radial * s0 + c1 * circ * c0};
}

StrainPairValues analytic_strain(const AnalyticDeformation& def, const LandmarkGrid& grid,
                                 double t, int image_size) {
  if (grid.frame_count() < 1) throw DataError("analytic_strain: grid has no frames");
  const auto& ed_px = grid.frame(0);
  const int nr = grid.rings();
  const int nc = grid.spokes();

  std::vector<Vec2> es_px(ed_px.size());
  for (std::size_t i = 0; i < ed_px.size(); ++i) {
    const Vec2 xn = normalize_coord(ed_px[i], image_size);
    es_px[i] = denormalize_coord(deform_point(def, xn, t), image_size);
  }

  auto dist = [](Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); };

  StrainPairValues out;
  out.circ.reserve(static_cast<std::size_t>(nr) * nc);
  for (int j = 0; j < nr; ++j) {
    for (int k = 0; k < nc; ++k) {
      const int p = j * nc + k;
      const int q = j * nc + (k + 1) % nc;
      const double l_ed = dist(ed_px[p], ed_px[q]);
      const double l_es = dist(es_px[p], es_px[q]);
      out.circ.push_back((l_es - l_ed) / l_ed);
    }
  }
  out.rad.reserve(static_cast<std::size_t>(nr - 1) * nc);
  for (int j = 0; j + 1 < nr; ++j) {
    for (int k = 0; k < nc; ++k) {
      const int p = j * nc + k;
      const int q = (j + 1) * nc + k;
      const double l_ed = dist(ed_px[p], ed_px[q]);
      const double l_es = dist(es_px[p], es_px[q]);
      out.rad.push_back((l_es - l_ed) / l_ed);
    }
  }

  double acc = 0.0;
  for (double v : out.circ) acc += v;
  out.gcs = acc / static_cast<double>(out.circ.size());
  acc = 0.0;
  for (double v : out.rad) acc += v;
  out.grs = acc / static_cast<double>(out.rad.size());
  return out;
}

}  // namespace tagtrack::synth
