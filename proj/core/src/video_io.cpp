// Copyright 2026 the vcpost authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcpost/video_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

std::uint8_t quantize8(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

std::vector<std::uint8_t> read_all_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError("short read from " + path.string());
  }
  return bytes;
}

struct PlaneGeometry {
  int luma_w, luma_h, chroma_w, chroma_h;
  std::size_t bytes_per_sample;
  std::size_t frame_bytes() const {
    const std::size_t luma = static_cast<std::size_t>(luma_w) * luma_h;
    const std::size_t chroma = static_cast<std::size_t>(chroma_w) * chroma_h;
    return (luma + 2 * chroma) * bytes_per_sample;
  }
};

PlaneGeometry geometry_for(int width, int height, Subsampling subsampling, int bit_depth) {
  PlaneGeometry g{};
  g.luma_w = width;
  g.luma_h = height;
  if (subsampling == Subsampling::s420) {
    g.chroma_w = (width + 1) / 2;
    g.chroma_h = (height + 1) / 2;
  } else {
    g.chroma_w = width;
    g.chroma_h = height;
  }
  g.bytes_per_sample = bit_depth > 8 ? 2 : 1;
  return g;
}

std::vector<double> decode_plane(const std::uint8_t* bytes, std::size_t samples, int bit_depth) {
  std::vector<double> plane(samples);
  if (bit_depth == 8) {
    for (std::size_t i = 0; i < samples; ++i) plane[i] = bytes[i] / 255.0;
  } else {
    const double peak = static_cast<double>((1 << bit_depth) - 1);
    for (std::size_t i = 0; i < samples; ++i) {
      const unsigned value = static_cast<unsigned>(bytes[2 * i]) |
                             (static_cast<unsigned>(bytes[2 * i + 1]) << 8);
      plane[i] = std::min(static_cast<double>(value), peak) / peak;
    }
  }
  return plane;
}

Frame decode_frame(const std::uint8_t* data, const PlaneGeometry& g, int bit_depth,
                   ChromaUpsampling upsampling) {
  const std::size_t luma_px = static_cast<std::size_t>(g.luma_w) * g.luma_h;
  const std::size_t chroma_px = static_cast<std::size_t>(g.chroma_w) * g.chroma_h;
  const std::size_t bps = g.bytes_per_sample;
  std::vector<double> y = decode_plane(data, luma_px, bit_depth);
  std::vector<double> cb = decode_plane(data + luma_px * bps, chroma_px, bit_depth);
  std::vector<double> cr = decode_plane(data + (luma_px + chroma_px) * bps, chroma_px, bit_depth);

  if (g.chroma_w == g.luma_w && g.chroma_h == g.luma_h) {
    Frame f(g.luma_w, g.luma_h, ColorSpace::ycbcr444);
    f.planes[0] = std::move(y);
    f.planes[1] = std::move(cb);
    f.planes[2] = std::move(cr);
    return f;
  }
  return chroma_upsample_420_to_444(y, g.luma_w, g.luma_h, cb, cr, g.chroma_w, g.chroma_h,
                                    upsampling);
}

}  // namespace

Clip read_planar_yuv(const std::filesystem::path& path, int width, int height,
                     Subsampling subsampling, int bit_depth, ChromaUpsampling upsampling) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("read_planar_yuv: dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  if (bit_depth != 8 && bit_depth != 10) {
    throw ValidationError("read_planar_yuv: unsupported bit depth " + std::to_string(bit_depth));
  }
  const PlaneGeometry g = geometry_for(width, height, subsampling, bit_depth);
  const std::vector<std::uint8_t> bytes = read_all_bytes(path);
  const std::size_t frame_bytes = g.frame_bytes();
  if (bytes.empty() || bytes.size() % frame_bytes != 0) {
    const std::size_t frames = bytes.size() / frame_bytes;
    throw IoError("truncated YUV file " + path.string() + ": expected a multiple of " +
                  std::to_string(frame_bytes) + " bytes, got " + std::to_string(bytes.size()) +
                  " (frame " + std::to_string(frames) + " incomplete at byte offset " +
                  std::to_string(frames * frame_bytes) + ")");
  }

  Clip clip;
  const std::size_t frame_count = bytes.size() / frame_bytes;
  clip.frames.reserve(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) {
    clip.frames.push_back(decode_frame(bytes.data() + i * frame_bytes, g, bit_depth, upsampling));
  }
  return clip;
}

void write_planar_yuv_444(const Clip& clip, const std::filesystem::path& path) {
  clip.require_valid("write_planar_yuv_444");
  if (clip.space() != ColorSpace::ycbcr444) {
    throw ValidationError("write_planar_yuv_444: clip must be YCbCr 4:4:4");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::vector<std::uint8_t> row;
  for (const Frame& f : clip.frames) {
    for (const auto& plane : f.planes) {
      row.resize(plane.size());
      for (std::size_t i = 0; i < plane.size(); ++i) row[i] = quantize8(plane[i]);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Clip read_y4m(const std::filesystem::path& path, ChromaUpsampling upsampling) {
  const std::vector<std::uint8_t> bytes = read_all_bytes(path);
  std::size_t pos = 0;
  auto read_line = [&](const char* what) {
    std::string line;
    while (pos < bytes.size() && bytes[pos] != '\n') {
      line.push_back(static_cast<char>(bytes[pos++]));
    }
    if (pos >= bytes.size()) {
      throw IoError("y4m " + path.string() + ": unterminated " + what + " at byte offset " +
                    std::to_string(pos));
    }
    ++pos;  // consume '\n'
    return line;
  };

  const std::string header = read_line("stream header");
  std::istringstream tokens(header);
  std::string token;
  tokens >> token;
  if (token != "YUV4MPEG2") {
    throw IoError("y4m " + path.string() + ": malformed header, expected YUV4MPEG2 signature");
  }
  int width = 0, height = 0, fps_num = 25, fps_den = 1;
  Subsampling subsampling = Subsampling::s420;  // Y4M default when C is absent
  while (tokens >> token) {
    if (token.empty()) continue;
    switch (token[0]) {
      case 'W':
        width = std::stoi(token.substr(1));
        break;
      case 'H':
        height = std::stoi(token.substr(1));
        break;
      case 'F': {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
          throw IoError("y4m " + path.string() + ": malformed frame-rate token " + token);
        }
        fps_num = std::stoi(token.substr(1, colon - 1));
        fps_den = std::stoi(token.substr(colon + 1));
        break;
      }
      case 'C': {
        if (token == "C444") {
          subsampling = Subsampling::s444;
        } else if (token == "C420" || token == "C420jpeg" || token == "C420mpeg2" ||
                   token == "C420paldv") {
          subsampling = Subsampling::s420;
        } else {
          throw IoError("y4m " + path.string() + ": unknown colorspace token " + token);
        }
        break;
      }
      default:
        break;  // interlacing, aspect and X extensions are ignored
    }
  }
  if (width <= 0 || height <= 0) {
    throw IoError("y4m " + path.string() + ": header missing W/H dimensions");
  }

  const PlaneGeometry g = geometry_for(width, height, subsampling, 8);
  const std::size_t frame_bytes = g.frame_bytes();
  Clip clip;
  clip.fps_num = fps_num;
  clip.fps_den = fps_den;
  while (pos < bytes.size()) {
    const std::size_t marker_offset = pos;
    const std::string frame_line = read_line("frame header");
    if (frame_line.rfind("FRAME", 0) != 0) {
      throw IoError("y4m " + path.string() + ": expected FRAME marker at byte offset " +
                    std::to_string(marker_offset));
    }
    if (bytes.size() - pos < frame_bytes) {
      throw IoError("y4m " + path.string() + ": truncated frame " +
                    std::to_string(clip.frames.size()) + ", expected " +
                    std::to_string(frame_bytes) + " payload bytes, got " +
                    std::to_string(bytes.size() - pos));
    }
    clip.frames.push_back(decode_frame(bytes.data() + pos, g, 8, upsampling));
    pos += frame_bytes;
  }
  if (clip.frames.empty()) {
    throw IoError("y4m " + path.string() + ": stream contains no frames");
  }
  return clip;
}

void write_y4m(const Clip& clip, const std::filesystem::path& path) {
  clip.require_valid("write_y4m");
  if (clip.space() != ColorSpace::ycbcr444) {
    throw ValidationError("write_y4m: clip must be YCbCr 4:4:4");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "YUV4MPEG2 W" << clip.width() << " H" << clip.height() << " F" << clip.fps_num << ":"
      << clip.fps_den << " C444\n";
  std::vector<std::uint8_t> row;
  for (const Frame& f : clip.frames) {
    out << "FRAME\n";
    for (const auto& plane : f.planes) {
      row.resize(plane.size());
      for (std::size_t i = 0; i < plane.size(); ++i) row[i] = quantize8(plane[i]);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::filesystem::path> write_png_sequence(const Clip& clip,
                                                      const std::filesystem::path& directory) {
  clip.require_valid("write_png_sequence");
  if (clip.space() != ColorSpace::rgb) {
    throw ValidationError("write_png_sequence: clip must be RGB; convert explicitly first");
  }
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create directory " + directory.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  written.reserve(clip.frames.size());
  for (std::size_t index = 0; index < clip.frames.size(); ++index) {
    const Frame& f = clip.frames[index];
    char name[16];
    std::snprintf(name, sizeof(name), "%06zu.png", index);
    const std::filesystem::path file = directory / name;

    FILE* fp = std::fopen(file.string().c_str(), "wb");
    if (fp == nullptr) throw IoError("cannot open " + file.string() + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png)) != 0) {
      if (png != nullptr) png_destroy_write_struct(&png, info != nullptr ? &info : nullptr);
      std::fclose(fp);
      throw IoError("libpng failure while writing " + file.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(f.width),
                 static_cast<png_uint_32>(f.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(f.width) * 3);
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        row[3 * static_cast<std::size_t>(x) + 0] = quantize8(f.sample(0, x, y));
        row[3 * static_cast<std::size_t>(x) + 1] = quantize8(f.sample(1, x, y));
        row[3 * static_cast<std::size_t>(x) + 2] = quantize8(f.sample(2, x, y));
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    written.push_back(file);
  }
  return written;
}

}  // namespace vcpost
