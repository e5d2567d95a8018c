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

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "tagtrack/io/dataset.hpp"
#include "tagtrack/synth/deformation.hpp"

namespace tagtrack::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void put_f32_le(std::vector<unsigned char>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  out.push_back(static_cast<unsigned char>(bits & 0xff));
  out.push_back(static_cast<unsigned char>((bits >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((bits >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((bits >> 24) & 0xff));
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void write_file(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("short write: " + path.string());
}

std::vector<unsigned char> read_file(const fs::path& path, std::size_t expected_bytes) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("missing payload file: " + path.string());
  f.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(f.tellg());
  if (size != expected_bytes)
    throw DataError("payload " + path.string() + " has " + std::to_string(size) +
                    " bytes, manifest declares " + std::to_string(expected_bytes));
  f.seekg(0);
  std::vector<unsigned char> bytes(size);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!f) throw DataError("short read: " + path.string());
  return bytes;
}

ordered_json deformation_to_json(const synth::AnalyticDeformation& d) {
  ordered_json j;
  j["center"] = {d.center.x, d.center.y};
  j["contraction_amplitude"] = d.contraction_amplitude;
  j["twist_amplitude"] = d.twist_amplitude;
  j["peak_time"] = d.peak_time;
  j["end_recovery"] = d.end_recovery;
  j["drift"] = {d.drift_amplitude.x, d.drift_amplitude.y};
  j["mode"] =
      d.mode == synth::DeformationMode::incompressible ? "incompressible" : "wall_thickening";
  j["thickening_amplitude"] = d.thickening_amplitude;
  j["epi_radius"] = d.epi_radius;
  j["area_scale_amplitude"] = d.area_scale_amplitude;
  return j;
}

synth::AnalyticDeformation deformation_from_json(const ordered_json& j) {
  synth::AnalyticDeformation d;
  d.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
  d.contraction_amplitude = j.at("contraction_amplitude").get<double>();
  d.twist_amplitude = j.at("twist_amplitude").get<double>();
  d.peak_time = j.at("peak_time").get<double>();
  d.end_recovery = j.at("end_recovery").get<double>();
  d.drift_amplitude = {j.at("drift").at(0).get<double>(), j.at("drift").at(1).get<double>()};
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "incompressible")
    d.mode = synth::DeformationMode::incompressible;
  else if (mode == "wall_thickening")
    d.mode = synth::DeformationMode::wall_thickening;
  else
    throw DataError("manifest: unknown deformation mode '" + mode + "'");
  d.thickening_amplitude = j.at("thickening_amplitude").get<double>();
  d.epi_radius = j.at("epi_radius").get<double>();
  d.area_scale_amplitude = j.at("area_scale_amplitude").get<double>();
  return d;
}

std::vector<unsigned char> encode_landmarks(const LandmarkGrid& grid) {
  std::vector<unsigned char> bytes;
  bytes.reserve(static_cast<std::size_t>(grid.frame_count()) * grid.points_per_frame() * 8);
  for (int t = 0; t < grid.frame_count(); ++t)
    for (const auto& p : grid.frame(t)) {
      put_f32_le(bytes, static_cast<float>(p.x));
      put_f32_le(bytes, static_cast<float>(p.y));
    }
  return bytes;
}

ordered_json load_manifest(const fs::path& dir) {
  std::ifstream f(dir / "manifest.json");
  if (!f) throw DataError("missing manifest: " + (dir / "manifest.json").string());
  ordered_json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw DataError("manifest parse error: " + std::string(e.what()));
  }
  return j;
}

}  // namespace

void write_dataset(const fs::path& dir, const std::vector<CaseRecord>& cases,
                   const std::string& generator_echo_json) {
  if (cases.empty()) throw DataError("write_dataset: no cases");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create dataset directory: " + dir.string());

  const int image_size = cases.front().series.image_size();
  ordered_json manifest;
  manifest["format_version"] = kDatasetFormatVersion;
  manifest["image_size"] = image_size;
  manifest["pixel_spacing_mm"] = cases.front().series.pixel_spacing_mm;
  manifest["frame_interval_s"] = cases.front().series.frame_interval_s;
  if (!generator_echo_json.empty())
    manifest["generator"] = ordered_json::parse(generator_echo_json);
  manifest["cases"] = ordered_json::array();

  for (const auto& rec : cases) {
    const auto& s = rec.series;
    if (s.image_size() != image_size)
      throw DataError("write_dataset: mixed image sizes are not supported");
    const std::string img_name = s.case_id + ".images.f32";
    const std::string lm_name = s.case_id + ".landmarks.f32";

    std::vector<unsigned char> img_bytes;
    img_bytes.reserve(static_cast<std::size_t>(s.frame_count()) * image_size * image_size * 4);
    for (const auto& frame : s.frames)
      for (const float v : frame.pixels) put_f32_le(img_bytes, v);
    write_file(dir / img_name, img_bytes);

    const auto lm_bytes = encode_landmarks(rec.landmarks);
    write_file(dir / lm_name, lm_bytes);

    ordered_json entry;
    entry["id"] = s.case_id;
    entry["slice"] = s.slice_index;
    entry["frames"] = s.frame_count();
    entry["rings"] = rec.landmarks.rings();
    entry["spokes"] = rec.landmarks.spokes();
    entry["images"] = {{"file", img_name}, {"bytes", img_bytes.size()}};
    entry["landmarks"] = {{"file", lm_name}, {"bytes", lm_bytes.size()}};
    if (rec.ground_truth_deformation)
      entry["deformation"] = deformation_to_json(*rec.ground_truth_deformation);
    else
      entry["deformation"] = nullptr;
    manifest["cases"].push_back(std::move(entry));
  }

  std::ofstream mf(dir / "manifest.json", std::ios::trunc);
  if (!mf) throw DataError("cannot write manifest: " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << "\n";
}

std::vector<CaseRecord> load_dataset(const fs::path& dir) {
  const auto manifest = load_manifest(dir);
  const int version = manifest.at("format_version").get<int>();
  if (version != kDatasetFormatVersion)
    throw DataError("dataset format_version " + std::to_string(version) + " unsupported (want " +
                    std::to_string(kDatasetFormatVersion) + ")");
  const int image_size = manifest.at("image_size").get<int>();
  const double spacing = manifest.at("pixel_spacing_mm").get<double>();
  const double interval = manifest.value("frame_interval_s", 0.05);

  std::vector<CaseRecord> cases;
  for (const auto& entry : manifest.at("cases")) {
    CaseRecord rec;
    auto& s = rec.series;
    s.case_id = entry.at("id").get<std::string>();
    s.slice_index = entry.at("slice").get<int>();
    s.pixel_spacing_mm = spacing;
    s.frame_interval_s = interval;
    const int frames = entry.at("frames").get<int>();
    const int rings = entry.at("rings").get<int>();
    const int spokes = entry.at("spokes").get<int>();
    if (frames < 2) throw DataError("dataset case " + s.case_id + ": need at least 2 frames");

    const std::size_t plane = static_cast<std::size_t>(image_size) * image_size;
    const auto img_bytes = read_file(dir / entry.at("images").at("file").get<std::string>(),
                                     entry.at("images").at("bytes").get<std::size_t>());
    if (img_bytes.size() != static_cast<std::size_t>(frames) * plane * 4)
      throw DataError("dataset case " + s.case_id + ": image payload size mismatch");
    s.frames.reserve(frames);
    const unsigned char* ip = img_bytes.data();
    for (int t = 0; t < frames; ++t) {
      Image img(image_size, image_size);
      for (std::size_t i = 0; i < plane; ++i, ip += 4) img.pixels[i] = get_f32_le(ip);
      s.frames.push_back(std::move(img));
    }

    const std::size_t pts = static_cast<std::size_t>(rings) * spokes;
    const auto lm_bytes = read_file(dir / entry.at("landmarks").at("file").get<std::string>(),
                                    entry.at("landmarks").at("bytes").get<std::size_t>());
    if (lm_bytes.size() != static_cast<std::size_t>(frames) * pts * 8)
      throw DataError("dataset case " + s.case_id + ": landmark payload size mismatch");
    LandmarkGrid grid(rings, spokes, {});
    const unsigned char* lp = lm_bytes.data();
    for (int t = 0; t < frames; ++t) {
      std::vector<Vec2> frame_pts;
      frame_pts.reserve(pts);
      for (std::size_t i = 0; i < pts; ++i, lp += 8) {
        const Vec2 p{static_cast<double>(get_f32_le(lp)),
                     static_cast<double>(get_f32_le(lp + 4))};
        if (p.x < 0.0 || p.y < 0.0 || p.x > image_size - 1 || p.y > image_size - 1)
          throw DataError("dataset case " + s.case_id + ": landmark outside image bounds");
        frame_pts.push_back(p);
      }
      grid.push_frame(std::move(frame_pts));
    }
    rec.landmarks = std::move(grid);

    if (!entry.at("deformation").is_null())
      rec.ground_truth_deformation = std::make_shared<synth::AnalyticDeformation>(
          deformation_from_json(entry.at("deformation")));
    cases.push_back(std::move(rec));
  }
  if (cases.empty()) throw DataError("dataset has no cases");
  return cases;
}

void write_tracks(const fs::path& dir, const std::vector<std::string>& case_ids,
                  const std::vector<LandmarkGrid>& grids, int image_size,
                  const std::string& provenance_json) {
  if (case_ids.size() != grids.size()) throw DataError("write_tracks: id/grid count mismatch");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create track directory: " + dir.string());

  ordered_json index;
  index["format_version"] = kDatasetFormatVersion;
  index["image_size"] = image_size;
  if (!provenance_json.empty()) index["provenance"] = ordered_json::parse(provenance_json);
  index["cases"] = ordered_json::array();
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const std::string name = case_ids[i] + ".landmarks.f32";
    const auto bytes = encode_landmarks(grids[i]);
    write_file(dir / name, bytes);
    ordered_json entry;
    entry["id"] = case_ids[i];
    entry["frames"] = grids[i].frame_count();
    entry["rings"] = grids[i].rings();
    entry["spokes"] = grids[i].spokes();
    entry["landmarks"] = {{"file", name}, {"bytes", bytes.size()}};
    index["cases"].push_back(std::move(entry));
  }
  std::ofstream f(dir / "tracks.json", std::ios::trunc);
  if (!f) throw DataError("cannot write track index: " + (dir / "tracks.json").string());
  f << index.dump(2) << "\n";
}

TrackSet load_tracks(const fs::path& dir) {
  std::ifstream f(dir / "tracks.json");
  if (!f) throw DataError("missing track index: " + (dir / "tracks.json").string());
  ordered_json index;
  try {
    f >> index;
  } catch (const std::exception& e) {
    throw DataError("track index parse error: " + std::string(e.what()));
  }
  if (index.at("format_version").get<int>() != kDatasetFormatVersion)
    throw DataError("track index format_version unsupported");

  TrackSet out;
  out.image_size = index.at("image_size").get<int>();
  for (const auto& entry : index.at("cases")) {
    const int frames = entry.at("frames").get<int>();
    const int rings = entry.at("rings").get<int>();
    const int spokes = entry.at("spokes").get<int>();
    const std::size_t pts = static_cast<std::size_t>(rings) * spokes;
    const auto bytes = read_file(dir / entry.at("landmarks").at("file").get<std::string>(),
                                 entry.at("landmarks").at("bytes").get<std::size_t>());
    if (bytes.size() != static_cast<std::size_t>(frames) * pts * 8)
      throw DataError("track payload size mismatch for case " +
                      entry.at("id").get<std::string>());
    LandmarkGrid grid(rings, spokes, {});
    const unsigned char* lp = bytes.data();
    for (int t = 0; t < frames; ++t) {
      std::vector<Vec2> frame_pts;
      frame_pts.reserve(pts);
      for (std::size_t i = 0; i < pts; ++i, lp += 8)
        frame_pts.push_back({static_cast<double>(get_f32_le(lp)),
                             static_cast<double>(get_f32_le(lp + 4))});
      grid.push_frame(std::move(frame_pts));
    }
    out.case_ids.push_back(entry.at("id").get<std::string>());
    out.grids.push_back(std::move(grid));
  }
  return out;
}

}  // namespace tagtrack::io
