// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/ingest/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <json.hpp>

#include "rovf/core/digest.hpp"
#include "rovf/core/random.hpp"

namespace rovf::ingest {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

long SynthConfig::n_frames() const noexcept { return std::lround(duration_s * source_fps); }

void SynthConfig::validate() const {
  if (n_identities < 1) throw ValidationError("synth: n_identities must be >= 1");
  if (!(duration_s > 0.0)) throw ValidationError("synth: duration must be > 0");
  if (n_videos < 1) throw ValidationError("synth: n_videos must be >= 1");
  if (width < 64 || height < 64) throw ValidationError("synth: frame must be at least 64x64");
  if (source_fps < 1) throw ValidationError("synth: source_fps must be >= 1");
  if (!(box_scale > 0.0)) throw ValidationError("synth: box_scale must be > 0");
}

SyntheticFrameProvider::SyntheticFrameProvider(SynthConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const long n_frames = cfg_.n_frames();
  const double fps = cfg_.source_fps;

  looks_.resize(static_cast<std::size_t>(cfg_.n_identities));
  for (int id = 0; id < cfg_.n_identities; ++id) {
    Rng rng = make_rng(cfg_.seed, "synth.look", {static_cast<std::uint64_t>(id)});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Look& look = looks_[static_cast<std::size_t>(id)];
    const double base[3] = {0.58, 0.45, 0.30};
    for (int c = 0; c < 3; ++c) look.body[c] = base[c] + (u(rng) - 0.5) * 0.24;
    const double dark = 0.35 + 0.35 * u(rng);
    for (int c = 0; c < 3; ++c) look.stripe[c] = look.body[c] * dark;
    look.stripe_freq = 1.5 + 3.0 * u(rng);
    look.stripe_angle = kPi * u(rng);
    look.stripe_phase = 2.0 * kPi * u(rng);
    look.mask_top = 0.10 + 0.20 * u(rng);
    look.mask_height = 0.05 + 0.10 * u(rng);
    look.size = (80.0 + 30.0 * u(rng)) * cfg_.box_scale;
    look.aspect = 0.55 + 0.35 * u(rng);
  }

  backgrounds_.resize(static_cast<std::size_t>(cfg_.n_videos));
  for (int v = 0; v < cfg_.n_videos; ++v) {
    Rng rng = make_rng(cfg_.seed, "synth.background", {static_cast<std::uint64_t>(v)});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double base[3];
    for (double& b : base) b = 0.45 + 0.25 * u(rng);
    double fx[3], fy[3], ph[3], amp[3];
    for (int k = 0; k < 3; ++k) {
      fx[k] = 0.01 + 0.06 * u(rng);
      fy[k] = 0.01 + 0.06 * u(rng);
      ph[k] = 2.0 * kPi * u(rng);
      amp[k] = 0.04 + 0.08 * u(rng);
    }
    const std::uint64_t noise_seed = derive_seed(cfg_.seed, "synth.background.noise",
                                                 {static_cast<std::uint64_t>(v)});
    auto& bg = backgrounds_[static_cast<std::size_t>(v)];
    bg.resize(static_cast<std::size_t>(cfg_.width) * cfg_.height * 3);
    for (int y = 0; y < cfg_.height; ++y) {
      for (int x = 0; x < cfg_.width; ++x) {
        double shade = 0.0;
        for (int k = 0; k < 3; ++k) shade += amp[k] * std::sin(fx[k] * x + fy[k] * y + ph[k]);
        const std::uint64_t h =
            mix64(noise_seed + static_cast<std::uint64_t>(y) * cfg_.width + x);
        const double grain = (unit_from_hash(h) - 0.5) * 0.10;
        for (int c = 0; c < 3; ++c) {
          bg[(static_cast<std::size_t>(y) * cfg_.width + x) * 3 + c] =
              to_byte(base[c] + shade * (1.0 - 0.2 * c) + grain);
        }
      }
    }
  }

  states_.resize(static_cast<std::size_t>(cfg_.n_videos) * cfg_.n_identities * n_frames);
  struct Segment {
    long start;
    int identity;
    long end;  // exclusive
  };
  for (int v = 0; v < cfg_.n_videos; ++v) {
    std::vector<Segment> segments;
    for (int id = 0; id < cfg_.n_identities; ++id) {
      Rng rng = make_rng(cfg_.seed, "synth.motion",
                         {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(id)});
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const Look& look = looks_[static_cast<std::size_t>(id)];
      const double speed = (1.5 + 4.5 * u(rng)) / fps;
      const double period = (5.0 + 10.0 * u(rng)) * fps;
      const double size_phase = 2.0 * kPi * u(rng);
      const double half_w = look.size * look.aspect * 0.55;
      const double half_h = look.size * 0.55;
      const double lo_x = half_w, hi_x = std::max(half_w + 1.0, cfg_.width - half_w);
      const double lo_y = half_h, hi_y = std::max(half_h + 1.0, cfg_.height - half_h);
      double px = lo_x + (hi_x - lo_x) * u(rng);
      double py = lo_y + (hi_y - lo_y) * u(rng);
      double vx = 0.0, vy = 0.0;

      // Visibility segments.
      std::vector<char> visible(static_cast<std::size_t>(n_frames), 0);
      long t = 0;
      while (t < n_frames) {
        const long len = std::lround((60.0 + 90.0 * u(rng)) * fps);
        const long end = std::min(n_frames, t + len);
        for (long f = t; f < end; ++f) visible[static_cast<std::size_t>(f)] = 1;
        segments.push_back({t, id, end});
        t = end + std::lround((3.0 + 5.0 * u(rng)) * fps);
      }

      long occluded_left = 0;
      for (long f = 0; f < n_frames; ++f) {
        vx = 0.85 * vx + speed * gauss(rng);
        vy = 0.85 * vy + speed * gauss(rng);
        px += vx;
        py += vy;
        if (px < lo_x) { px = 2 * lo_x - px; vx = -vx; }
        if (px > hi_x) { px = 2 * hi_x - px; vx = -vx; }
        if (py < lo_y) { py = 2 * lo_y - py; vy = -vy; }
        if (py > hi_y) { py = 2 * hi_y - py; vy = -vy; }
        px = std::clamp(px, lo_x, hi_x);
        py = std::clamp(py, lo_y, hi_y);
        const double scale = 1.0 + 0.05 * std::sin(2.0 * kPi * f / period + size_phase);
        const bool occlusion_roll = u(rng) < 0.03;
        const long occlusion_len = 1 + static_cast<long>(u(rng) * 3.0);

        State& s = states_[(static_cast<std::size_t>(v) * cfg_.n_identities + id) * n_frames + f];
        s.visible = visible[static_cast<std::size_t>(f)] != 0;
        if (!s.visible) {
          occluded_left = 0;
          continue;
        }
        const bool segment_start = f == 0 || !visible[static_cast<std::size_t>(f - 1)];
        if (occluded_left == 0 && occlusion_roll && !segment_start) occluded_left = occlusion_len;
        s.occluded = occluded_left > 0;
        if (occluded_left > 0) --occluded_left;
        s.w = look.size * look.aspect * scale;
        s.h = look.size * scale;
        s.x = px - s.w / 2.0;
        s.y = py - s.h / 2.0;
      }
    }

    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
      return std::tie(a.start, a.identity) < std::tie(b.start, b.identity);
    });
    for (std::size_t i = 0; i < segments.size(); ++i) {
      Track track;
      track.video_id = v;
      track.track_id = static_cast<int>(i);
      for (long f = segments[i].start; f < segments[i].end; ++f) {
        const State& s = state(v, segments[i].identity, f);
        track.boxes.push_back({f, s.x, s.y, s.w, s.h, s.occluded});
      }
      identity_[track.key()] = segments[i].identity;
      tracks_.push_back(std::move(track));
    }
  }
}

const SyntheticFrameProvider::State& SyntheticFrameProvider::state(int video, int identity,
                                                                    long frame) const {
  return states_[(static_cast<std::size_t>(video) * cfg_.n_identities + identity) *
                     cfg_.n_frames() +
                 frame];
}

Image SyntheticFrameProvider::frame(int video_id, long frame_index) const {
  if (video_id < 0 || video_id >= cfg_.n_videos || frame_index < 0 ||
      frame_index >= cfg_.n_frames()) {
    throw MissingFrame("synthetic source has no frame " + std::to_string(frame_index) +
                       " in video " + std::to_string(video_id));
  }
  Image img(cfg_.width, cfg_.height, 3);
  img.pixels = backgrounds_[static_cast<std::size_t>(video_id)];
  const std::uint64_t frame_seed =
      derive_seed(cfg_.seed, "synth.frame",
                  {static_cast<std::uint64_t>(video_id), static_cast<std::uint64_t>(frame_index)});
  for (int id = 0; id < cfg_.n_identities; ++id) {
    const State& s = state(video_id, id, frame_index);
    if (!s.visible) continue;
    const Look& look = looks_[static_cast<std::size_t>(id)];
    const double brightness =
        1.0 + 0.16 * (unit_from_hash(mix64(frame_seed ^ static_cast<std::uint64_t>(id))) - 0.5);
    const double ca = std::cos(look.stripe_angle), sa = std::sin(look.stripe_angle);
    const int x_begin = std::max(0, static_cast<int>(std::floor(s.x)));
    const int x_end = std::min(cfg_.width, static_cast<int>(std::ceil(s.x + s.w)));
    const int y_begin = std::max(0, static_cast<int>(std::floor(s.y)));
    const int y_end = std::min(cfg_.height, static_cast<int>(std::ceil(s.y + s.h)));
    for (int y = y_begin; y < y_end; ++y) {
      const double v = (y + 0.5 - s.y) / s.h;
      for (int x = x_begin; x < x_end; ++x) {
        const double u = (x + 0.5 - s.x) / s.w;
        const double du = (u - 0.5) * 2.0, dv = (v - 0.5) * 2.0;
        if (du * du + dv * dv > 1.0) continue;
        double color[3];
        if (s.occluded && v > 0.35) {
          color[0] = color[1] = color[2] = 0.5;
        } else {
          const double p =
              0.5 + 0.5 * std::sin(2.0 * kPi * look.stripe_freq * (u * ca + v * sa) +
                                   look.stripe_phase);
          const bool mask = v >= look.mask_top && v < look.mask_top + look.mask_height;
          const double noise =
              (unit_from_hash(mix64(frame_seed + static_cast<std::uint64_t>(y) * cfg_.width +
                                    static_cast<std::uint64_t>(x))) -
               0.5) *
              0.08;
          for (int c = 0; c < 3; ++c) {
            double value = look.body[c] * (1.0 - p) + look.stripe[c] * p;
            if (mask) value *= 0.45;
            color[c] = value * brightness + noise;
          }
        }
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = to_byte(color[c]);
      }
    }
  }
  return img;
}

SynthWorld synth_tracks(const SynthConfig& cfg) {
  auto provider = std::make_shared<const SyntheticFrameProvider>(cfg);
  SynthWorld world;
  world.config = provider->config();
  world.tracks = provider->tracks();
  world.identity = provider->identities();
  world.frames = std::move(provider);
  return world;
}

SynthWorld synth_tracks(int n_identities, double duration_s, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_identities = n_identities;
  cfg.duration_s = duration_s;
  cfg.seed = seed;
  return synth_tracks(cfg);
}

void write_synth_descriptor(const std::filesystem::path& path, const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = "rovf-synthetic-frames";
  j["version"] = 1;
  j["n_identities"] = cfg.n_identities;
  j["duration_s"] = cfg.duration_s;
  j["n_videos"] = cfg.n_videos;
  j["seed"] = cfg.seed;
  j["width"] = cfg.width;
  j["height"] = cfg.height;
  j["source_fps"] = cfg.source_fps;
  j["box_scale"] = cfg.box_scale;
  write_file(path, j.dump(2) + "\n");
}

SynthConfig read_synth_descriptor(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (j.value("kind", "") != "rovf-synthetic-frames" || j.value("version", 0) != 1) {
    throw FormatError(path.string() + ": not a synthetic frame descriptor");
  }
  SynthConfig cfg;
  try {
    cfg.n_identities = j.at("n_identities").get<int>();
    cfg.duration_s = j.at("duration_s").get<double>();
    cfg.n_videos = j.at("n_videos").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.width = j.at("width").get<int>();
    cfg.height = j.at("height").get<int>();
    cfg.source_fps = j.at("source_fps").get<int>();
    cfg.box_scale = j.at("box_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace rovf::ingest
