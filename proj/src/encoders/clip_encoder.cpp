// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/encoders/clip_encoder.hpp"

#include "rovf/core/error.hpp"

namespace rovf::encoders {

std::vector<FrameTokens> ToyClipEncoder::encode(long clip_id) const {
  const ingest::ClipPixels& block = pixels_.at(clip_id);
  std::vector<FrameTokens> frames;
  frames.reserve(static_cast<std::size_t>(block.frames));
  for (int i = 0; i < block.frames; ++i) frames.push_back(encoder_.encode(block.frame(i)));
  return frames;
}

std::vector<Var> ToyClipEncoder::encode(Graph& graph, long clip_id, Gradients* grads) const {
  const ingest::ClipPixels& block = pixels_.at(clip_id);
  std::vector<Var> frames;
  frames.reserve(static_cast<std::size_t>(block.frames));
  for (int i = 0; i < block.frames; ++i) {
    frames.push_back(encoder_.encode(graph, block.frame(i), grads));
  }
  return frames;
}

std::vector<FrameTokens> PrecomputedClipEncoder::encode(long clip_id) const {
  const ClipEmbedding& clip = store_.at(static_cast<std::uint64_t>(clip_id));
  std::vector<FrameTokens> frames;
  frames.reserve(clip.n_frames);
  for (std::uint32_t i = 0; i < clip.n_frames; ++i) {
    frames.push_back(store_.frame_tokens(static_cast<std::uint64_t>(clip_id), i));
  }
  return frames;
}

std::vector<Var> PrecomputedClipEncoder::encode(Graph& graph, long clip_id, Gradients*) const {
  std::vector<Var> frames;
  for (FrameTokens& ft : encode(clip_id)) frames.push_back(graph.constant(std::move(ft.tokens)));
  return frames;
}

}  // namespace rovf::encoders
