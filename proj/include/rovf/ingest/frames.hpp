// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "rovf/core/error.hpp"
#include "rovf/ingest/clips.hpp"

namespace rovf::ingest {

/// 8-bit RGB frame, interleaved (row, column, channel).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c = 3)
      : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, 0) {}

  std::uint8_t at(int x, int y, int c) const noexcept {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c) noexcept {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

class MissingFrame : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Source of full-resolution frames. Implementations must be safe for
/// concurrent calls.
class FrameProvider {
 public:
  virtual ~FrameProvider() = default;
  /// Throws MissingFrame when the frame is unavailable.
  virtual Image frame(int video_id, long frame_index) const = 0;
};

/// Frames stored as binary PPM files: `<root>/v<video_id>/<frame:06>.ppm`.
class DirectoryFrameProvider : public FrameProvider {
 public:
  explicit DirectoryFrameProvider(std::filesystem::path root) : root_(std::move(root)) {}
  Image frame(int video_id, long frame_index) const override;
  static std::filesystem::path frame_path(const std::filesystem::path& root, int video_id,
                                          long frame_index);

 private:
  std::filesystem::path root_;
};

/// Opens a frames directory. A directory containing `synthetic.json` is
/// rendered procedurally; anything else is read as PPM images.
std::shared_ptr<const FrameProvider> open_frame_source(const std::filesystem::path& dir);

Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& image);

/// Square crop in planar float layout (channel, row, column), values in [0, 1].
struct SquareCrop {
  int side = 0;
  long x0 = 0;  // source coordinates of the top-left crop pixel
  long y0 = 0;
  long padded_pixels = 0;  // per channel, pixels that fell outside the image
  long content_pixels = 0;
  std::vector<float> data;
};

/// Extracts a ceil(side) x ceil(side) square centred on (cx, cy); pixels
/// outside the image are zero.
SquareCrop extract_square(const Image& image, double cx, double cy, double side);

/// Bilinear resize of a planar square image (half-pixel centres, edge clamp).
/// Resizing to the same size is the identity.
std::vector<float> resize_bilinear(std::span<const float> src, int channels, int in_side,
                                   int out_side);

/// Pixel block of one clip: frames x channels x side x side, values in [0, 1].
struct ClipPixels {
  int frames = 0;
  int channels = 3;
  int side = 0;
  std::vector<float> data;

  std::size_t frame_size() const noexcept {
    return static_cast<std::size_t>(channels) * side * side;
  }
  std::span<const float> frame(int i) const noexcept {
    return {data.data() + frame_size() * static_cast<std::size_t>(i), frame_size()};
  }
};

/// Crops every frame of `clip` to its crop_side square around the per-frame
/// box centre and resizes it to resize_to x resize_to.
ClipPixels crop_frames(const ClipSpec& clip, const FrameProvider& source, int resize_to);

/// Frame `position` of `clip`; a MissingFrame error names the clip.
Image load_clip_frame(const ClipSpec& clip, std::size_t position, const FrameProvider& source);
/// Crop of frame `position` of `clip` from `img`, resized into `out`
/// (channels x resize_to x resize_to floats).
void crop_frame_into(const Image& img, const ClipSpec& clip, std::size_t position,
                     int resize_to, std::span<float> out);

}  // namespace rovf::ingest
