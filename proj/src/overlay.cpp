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
#include <cstdint>
#include <fstream>

#include "tagtrack/io/overlay.hpp"

namespace tagtrack::io {

namespace {

void put_u16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

struct Rgb {
  unsigned char r, g, b;
};

constexpr Rgb kClassColors[8] = {
    {0, 200, 0},     // reference point
    {220, 40, 40},   // predicted point
    {120, 255, 120}, // reference endocardial ring
    {255, 160, 40},  // predicted endocardial ring
    {255, 255, 0},   // center marker
    {60, 120, 255},  // ring line
    {0, 200, 200},   // spoke line
    {255, 255, 255}, // annotation
};

void draw_cross(std::vector<unsigned char>& px, int w, int h, Vec2 p, unsigned char cls) {
  const int cx = static_cast<int>(std::lround(p.x));
  const int cy = static_cast<int>(std::lround(p.y));
  for (int d = -1; d <= 1; ++d) {
    const int x = cx + d;
    const int y = cy + d;
    if (x >= 0 && x < w && cy >= 0 && cy < h) px[static_cast<std::size_t>(cy) * w + x] = cls;
    if (cx >= 0 && cx < w && y >= 0 && y < h) px[static_cast<std::size_t>(y) * w + cx] = cls;
  }
}

}  // namespace

std::vector<unsigned char> encode_overlay_bmp(const Image& background,
                                              const std::vector<Vec2>& ref_points,
                                              const std::vector<Vec2>& pred_points,
                                              int spokes) {
  const int w = background.width;
  const int h = background.height;
  if (w < 1 || h < 1) throw DataError("encode_overlay_bmp: empty background");

  std::vector<unsigned char> px(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const float v = background.pixels[i];
    const float clamped = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    px[i] = static_cast<unsigned char>(std::lround(clamped * 239.0f));
  }

  // endocardial ring = first `spokes` points, when the caller tells us the
  // grid topology; reference first so predictions stay visible on overlap
  for (std::size_t i = 0; i < ref_points.size(); ++i) {
    const bool endo = spokes > 0 && i < static_cast<std::size_t>(spokes);
    draw_cross(px, w, h, ref_points[i], endo ? kOverlayClassRefEndo : kOverlayClassRef);
  }
  for (std::size_t i = 0; i < pred_points.size(); ++i) {
    const bool endo = spokes > 0 && i < static_cast<std::size_t>(spokes);
    draw_cross(px, w, h, pred_points[i], endo ? kOverlayClassPredEndo : kOverlayClassPred);
  }

  const int row_stride = (w + 3) & ~3;
  const std::uint32_t data_size = static_cast<std::uint32_t>(row_stride) * h;
  const std::uint32_t data_offset = 14 + 40 + 256 * 4;

  std::vector<unsigned char> out;
  out.reserve(data_offset + data_size);
  // BITMAPFILEHEADER
  out.push_back('B');
  out.push_back('M');
  put_u32(out, data_offset + data_size);
  put_u16(out, 0);
  put_u16(out, 0);
  put_u32(out, data_offset);
  // BITMAPINFOHEADER
  put_u32(out, 40);
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u16(out, 1);
  put_u16(out, 8);
  put_u32(out, 0);  // BI_RGB
  put_u32(out, data_size);
  put_u32(out, 2835);
  put_u32(out, 2835);
  put_u32(out, 256);
  put_u32(out, 0);
  // palette: grayscale ramp then the 8 class colors, padded to 256
  for (int i = 0; i < 240; ++i) {
    const unsigned char g = static_cast<unsigned char>(std::lround(i * 255.0 / 239.0));
    out.push_back(g);
    out.push_back(g);
    out.push_back(g);
    out.push_back(0);
  }
  for (const auto& c : kClassColors) {
    out.push_back(c.b);
    out.push_back(c.g);
    out.push_back(c.r);
    out.push_back(0);
  }
  for (int i = 248; i < 256; ++i) {
    out.push_back(0);
    out.push_back(0);
    out.push_back(0);
    out.push_back(0);
  }
  // pixels, bottom-up, rows padded to 4 bytes
  for (int row = h - 1; row >= 0; --row) {
    const unsigned char* src = px.data() + static_cast<std::size_t>(row) * w;
    out.insert(out.end(), src, src + w);
    for (int pad = w; pad < row_stride; ++pad) out.push_back(0);
  }
  return out;
}

void write_overlay_bmp(const std::filesystem::path& path, const Image& background,
                       const std::vector<Vec2>& ref_points, const std::vector<Vec2>& pred_points,
                       int spokes) {
  const auto bytes = encode_overlay_bmp(background, ref_points, pred_points, spokes);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write overlay: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("short write: " + path.string());
}

}  // namespace tagtrack::io
