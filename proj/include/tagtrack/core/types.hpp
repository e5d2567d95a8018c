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

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tagtrack/util/errors.hpp"

namespace tagtrack::synth {
struct AnalyticDeformation;
}

namespace tagtrack {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Grayscale image, row-major, intensities in [0,1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;  // height*width

  Image() = default;
  Image(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, 0.0f) {}

  float& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  float at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// One slice's cine stack plus spatial calibration. Frame 0 is the
/// end-diastolic reference.
struct TagFrameSeries {
  std::vector<Image> frames;
  double pixel_spacing_mm = 1.0;
  double frame_interval_s = 0.05;
  std::string case_id;
  int slice_index = 0;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int image_size() const { return frames.empty() ? 0 : frames.front().width; }
};

/// Structured ring x spoke landmark set, one point list per frame.
/// Point index p = ring * spokes + spoke. Ring 0 is the endocardium; spokes
/// advance counter-clockwise and close cyclically. Coordinates in pixels.
class LandmarkGrid {
 public:
  LandmarkGrid() = default;
  LandmarkGrid(int rings, int spokes, std::vector<std::vector<Vec2>> frames)
      : rings_(rings), spokes_(spokes), frames_(std::move(frames)) {
    if (rings_ < 1 || spokes_ < 1) throw DataError("LandmarkGrid: rings and spokes must be positive");
    const std::size_t expected = static_cast<std::size_t>(rings_) * spokes_;
    for (const auto& f : frames_)
      if (f.size() != expected)
        throw DataError("LandmarkGrid: frame has " + std::to_string(f.size()) +
                        " points, expected rings*spokes = " + std::to_string(expected));
  }

  int rings() const { return rings_; }
  int spokes() const { return spokes_; }
  int points_per_frame() const { return rings_ * spokes_; }
  int frame_count() const { return static_cast<int>(frames_.size()); }

  const std::vector<Vec2>& frame(int t) const { return frames_.at(t); }
  std::vector<Vec2>& frame(int t) { return frames_.at(t); }
  const std::vector<std::vector<Vec2>>& frames() const { return frames_; }

  Vec2 point(int t, int ring, int spoke) const {
    return frames_.at(t)[static_cast<std::size_t>(ring) * spokes_ + spoke];
  }

  void push_frame(std::vector<Vec2> pts) {
    if (pts.size() != static_cast<std::size_t>(rings_) * spokes_)
      throw DataError("LandmarkGrid: appended frame has wrong point count");
    frames_.push_back(std::move(pts));
  }

 private:
  int rings_ = 0;
  int spokes_ = 0;
  std::vector<std::vector<Vec2>> frames_;
};

/// One training/evaluation case. ground_truth_deformation is non-null for
/// synthetic cases only and enables exact strain oracles.
struct CaseRecord {
  TagFrameSeries series;
  LandmarkGrid landmarks;
  std::shared_ptr<const synth::AnalyticDeformation> ground_truth_deformation;
};

}  // namespace tagtrack
