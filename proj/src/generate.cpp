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
#include <memory>

#include "tagtrack/core/coords.hpp"
#include "tagtrack/core/grid.hpp"
#include "tagtrack/synth/generate.hpp"

namespace tagtrack::synth {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

struct Draw {
  AnalyticDeformation def;
  TagPattern pattern;
  double r_endo_px = 0.0, r_epi_px = 0.0;
  Vec2 center_px;
};

Draw sample_case(Rng& rng, const SynthConfig& cfg) {
  Draw d;
  const double mid = 0.5 * (cfg.image_size - 1);
  d.center_px = {mid + rng.uniform(-cfg.center_jitter_px, cfg.center_jitter_px),
                 mid + rng.uniform(-cfg.center_jitter_px, cfg.center_jitter_px)};
  d.r_endo_px = rng.uniform(cfg.r_endo_px_min, cfg.r_endo_px_max);
  d.r_epi_px = d.r_endo_px + rng.uniform(cfg.wall_px_min, cfg.wall_px_max);

  const double half = 0.5 * (cfg.image_size - 1);
  const double r_endo_n = d.r_endo_px / half;
  const double r_epi_n = d.r_epi_px / half;
  const double r_mid_n = 0.5 * (r_endo_n + r_epi_n);

  auto& def = d.def;
  def.center = normalize_coord(d.center_px, cfg.image_size);
  def.mode = cfg.mode;
  const double contraction = rng.uniform(cfg.contraction_min, cfg.contraction_max);
  def.contraction_amplitude = r_mid_n * r_mid_n * (1.0 - (1.0 - contraction) * (1.0 - contraction));
  def.twist_amplitude = rng.uniform(-cfg.twist_abs_max, cfg.twist_abs_max);
  def.peak_time = rng.uniform(cfg.t_es_min, cfg.t_es_max);
  def.end_recovery = rng.uniform(cfg.end_recovery_min, cfg.end_recovery_max);
  def.drift_amplitude = {rng.uniform(-cfg.drift_px_max, cfg.drift_px_max) / half,
                         rng.uniform(-cfg.drift_px_max, cfg.drift_px_max) / half};
  def.thickening_amplitude = rng.uniform(cfg.thickening_min, cfg.thickening_max);
  def.epi_radius = r_epi_n;
  def.area_scale_amplitude = rng.uniform(cfg.area_scale_min, cfg.area_scale_max);
  if (def.mode == DeformationMode::wall_thickening) {
    def.contraction_amplitude = 0.0;
    def.area_scale_amplitude = 0.0;
  } else {
    def.thickening_amplitude = 0.0;
  }

  auto& p = d.pattern;
  p.tag_spacing_px = rng.uniform(cfg.tag_spacing_min, cfg.tag_spacing_max);
  p.tag_contrast = rng.uniform(cfg.contrast_min, cfg.contrast_max);
  p.fading_half_life_frames = rng.uniform(cfg.half_life_min, cfg.half_life_max);
  p.noise_sigma = rng.uniform(cfg.noise_min, cfg.noise_max);
  p.myocardium_intensity = rng.uniform(cfg.myo_min, cfg.myo_max);
  p.blood_intensity = rng.uniform(cfg.blood_min, cfg.blood_max);
  p.background_intensity = rng.uniform(cfg.bg_min, cfg.bg_max);
  p.grid_angle = cfg.randomize_grid_angle ? rng.uniform(0.0, 0.5 * kPi) : 0.0;
  return d;
}

bool draw_valid(const Draw& d, const SynthConfig& cfg) {
  const double half = 0.5 * (cfg.image_size - 1);
  const double r_endo_n = d.r_endo_px / half;
  const double r_epi_n = d.r_epi_px / half;
  if (d.def.mode == DeformationMode::incompressible) {
    // every annulus point must stay real at peak contraction, with margin
    if (r_endo_n * r_endo_n < 1.05 * d.def.contraction_amplitude) return false;
  } else {
    const double w = d.def.thickening_amplitude;
    if (r_endo_n <= 1.05 * r_epi_n * w / (1.0 + w)) return false;
  }
  // keep the deformed annulus plus drift inside the field of view
  const double max_r = r_epi_n * (1.0 + d.def.thickening_amplitude);
  const double drift = std::hypot(d.def.drift_amplitude.x, d.def.drift_amplitude.y);
  const double center_off = std::max(std::abs(d.def.center.x), std::abs(d.def.center.y));
  return center_off + max_r + drift < 0.98;
}

}  // namespace

CaseRecord generate_case(std::uint64_t seed, const SynthConfig& cfg, const std::string& case_id) {
  if (cfg.frame_count < 2) throw DataError("generate_case: need at least 2 frames");
  if (cfg.image_size < 32) throw DataError("generate_case: image_size must be >= 32");
  if (cfg.rings < 2 || cfg.spokes < 3)
    throw DataError("generate_case: rings must be >= 2 and spokes >= 3");

  Rng rng(seed);
  Draw draw;
  bool ok = false;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    draw = sample_case(rng, cfg);
    if (draw_valid(draw, cfg)) {
      ok = true;
      break;
    }
  }
  if (!ok)
    throw DataError("generate_case: no valid deformation after " +
                    std::to_string(cfg.max_retries) + " draws; ranges too aggressive");

  CaseRecord rec;
  rec.series.case_id = case_id;
  rec.series.slice_index = 0;
  rec.series.pixel_spacing_mm = cfg.pixel_spacing_mm;

  LandmarkGrid ed =
      make_landmark_grid(draw.center_px, draw.r_endo_px, draw.r_epi_px, cfg.rings, cfg.spokes);

  LandmarkGrid traj(cfg.rings, cfg.spokes, {});
  for (int f = 0; f < cfg.frame_count; ++f) {
    const double t = normalize_time(f, cfg.frame_count);
    std::vector<Vec2> pts;
    pts.reserve(ed.frame(0).size());
    for (const auto& p : ed.frame(0)) {
      const Vec2 xn = normalize_coord(p, cfg.image_size);
      pts.push_back(denormalize_coord(deform_point(draw.def, xn, t), cfg.image_size));
    }
    traj.push_frame(std::move(pts));
  }
  rec.landmarks = std::move(traj);

  const double half = 0.5 * (cfg.image_size - 1);
  RenderGeometry geom;
  geom.image_size = cfg.image_size;
  geom.frame_count = cfg.frame_count;
  geom.r_endo_norm = draw.r_endo_px / half;
  geom.r_epi_norm = draw.r_epi_px / half;
  rec.series.frames.reserve(cfg.frame_count);
  for (int f = 0; f < cfg.frame_count; ++f) {
    const double t = normalize_time(f, cfg.frame_count);
    rec.series.frames.push_back(render_frame(draw.def, draw.pattern, t, geom, rng));
  }

  for (int f = 0; f < cfg.frame_count; ++f)
    for (const auto& p : rec.landmarks.frame(f))
      if (p.x < 0.0 || p.y < 0.0 || p.x > cfg.image_size - 1 || p.y > cfg.image_size - 1)
        throw DataError("generate_case: landmark left the image bounds");

  rec.ground_truth_deformation = std::make_shared<AnalyticDeformation>(draw.def);
  return rec;
}

}  // namespace tagtrack::synth
