// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rovf/ingest/synth.hpp"

namespace rovf::ingest {

std::filesystem::path DirectoryFrameProvider::frame_path(const std::filesystem::path& root,
                                                         int video_id, long frame_index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06ld.ppm", frame_index);
  return root / ("v" + std::to_string(video_id)) / name;
}

Image DirectoryFrameProvider::frame(int video_id, long frame_index) const {
  const auto path = frame_path(root_, video_id, frame_index);
  if (!std::filesystem::exists(path)) {
    throw MissingFrame("missing frame " + std::to_string(frame_index) + " of video " +
                       std::to_string(video_id) + " (" + path.string() + ")");
  }
  return read_ppm(path);
}

std::shared_ptr<const FrameProvider> open_frame_source(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ValidationError("frames directory does not exist: " + dir.string());
  }
  const auto descriptor = dir / "synthetic.json";
  if (std::filesystem::exists(descriptor)) {
    return std::make_shared<SyntheticFrameProvider>(read_synth_descriptor(descriptor));
  }
  return std::make_shared<DirectoryFrameProvider>(dir);
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFrame("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
    throw FormatError(path.string() + ": not an 8-bit binary PPM");
  }
  in.get();
  Image img(w, h, 3);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw FormatError(path.string() + ": truncated PPM payload");
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  if (image.channels != 3) throw ValidationError("write_ppm: only RGB images are supported");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw ValidationError("cannot write " + path.string());
}

SquareCrop extract_square(const Image& image, double cx, double cy, double side) {
  SquareCrop crop;
  crop.side = std::max(1, static_cast<int>(std::ceil(side)));
  const int n = crop.side;
  crop.x0 = std::lround(cx - n / 2.0);
  crop.y0 = std::lround(cy - n / 2.0);
  const int c = image.channels;
  crop.data.assign(static_cast<std::size_t>(c) * n * n, 0.0f);
  for (int r = 0; r < n; ++r) {
    const long sy = crop.y0 + r;
    for (int col = 0; col < n; ++col) {
      const long sx = crop.x0 + col;
      if (sy < 0 || sy >= image.height || sx < 0 || sx >= image.width) {
        ++crop.padded_pixels;
        continue;
      }
      ++crop.content_pixels;
      for (int ch = 0; ch < c; ++ch) {
        crop.data[(static_cast<std::size_t>(ch) * n + r) * n + col] =
            static_cast<float>(image.at(static_cast<int>(sx), static_cast<int>(sy), ch)) / 255.0f;
      }
    }
  }
  return crop;
}

std::vector<float> resize_bilinear(std::span<const float> src, int channels, int in_side,
                                   int out_side) {
  if (src.size() != static_cast<std::size_t>(channels) * in_side * in_side) {
    throw std::invalid_argument("resize_bilinear: source size mismatch");
  }
  std::vector<float> out(static_cast<std::size_t>(channels) * out_side * out_side);
  if (in_side == out_side) {
    std::copy(src.begin(), src.end(), out.begin());
    return out;
  }
  const double scale = static_cast<double>(in_side) / out_side;
  struct Tap {
    int lo, hi;
    double frac;
  };
  std::vector<Tap> taps(static_cast<std::size_t>(out_side));
  for (int i = 0; i < out_side; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_side - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, in_side - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, s - lo};
  }
  for (int ch = 0; ch < channels; ++ch) {
    const float* plane = src.data() + static_cast<std::size_t>(ch) * in_side * in_side;
    float* dst = out.data() + static_cast<std::size_t>(ch) * out_side * out_side;
    for (int r = 0; r < out_side; ++r) {
      const Tap& ty = taps[static_cast<std::size_t>(r)];
      for (int c = 0; c < out_side; ++c) {
        const Tap& tx = taps[static_cast<std::size_t>(c)];
        const double top = plane[ty.lo * in_side + tx.lo] * (1.0 - tx.frac) +
                           plane[ty.lo * in_side + tx.hi] * tx.frac;
        const double bottom = plane[ty.hi * in_side + tx.lo] * (1.0 - tx.frac) +
                              plane[ty.hi * in_side + tx.hi] * tx.frac;
        dst[r * out_side + c] = static_cast<float>(top * (1.0 - ty.frac) + bottom * ty.frac);
      }
    }
  }
  return out;
}

void crop_frame_into(const Image& img, const ClipSpec& clip, std::size_t position,
                     int resize_to, std::span<float> out) {
  if (img.channels != 3) {
    throw FormatError("clip " + std::to_string(clip.clip_id) + ": frame " +
                      std::to_string(clip.frame_indices[position]) + " is not RGB");
  }
  const SquareCrop crop = extract_square(img, clip.crop_centers[position].cx,
                                         clip.crop_centers[position].cy, clip.crop_side);
  const auto resized = resize_bilinear(crop.data, 3, crop.side, resize_to);
  std::copy(resized.begin(), resized.end(), out.begin());
}

Image load_clip_frame(const ClipSpec& clip, std::size_t position, const FrameProvider& source) {
  try {
    return source.frame(clip.video_id, clip.frame_indices[position]);
  } catch (const MissingFrame& e) {
    throw MissingFrame("clip " + std::to_string(clip.clip_id) + ": frame " +
                       std::to_string(clip.frame_indices[position]) + " unavailable: " + e.what());
  }
}

ClipPixels crop_frames(const ClipSpec& clip, const FrameProvider& source, int resize_to) {
  ClipPixels block;
  block.frames = static_cast<int>(clip.frame_indices.size());
  block.side = resize_to;
  block.channels = 3;
  block.data.resize(block.frame_size() * static_cast<std::size_t>(block.frames));
  for (std::size_t i = 0; i < clip.frame_indices.size(); ++i) {
    crop_frame_into(load_clip_frame(clip, i, source), clip, i, resize_to,
                    std::span<float>(block.data).subspan(i * block.frame_size(), block.frame_size()));
  }
  return block;
}

}  // namespace rovf::ingest
