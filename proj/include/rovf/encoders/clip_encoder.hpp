// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "rovf/core/autodiff.hpp"
#include "rovf/encoders/embedding_store.hpp"
#include "rovf/encoders/encoder.hpp"
#include "rovf/ingest/pixel_cache.hpp"

namespace rovf::encoders {

/// Turns a clip id into per-frame tokens, either evaluated or on a graph.
class ClipEncoder {
 public:
  virtual ~ClipEncoder() = default;

  virtual int d_model() const = 0;
  virtual std::vector<FrameTokens> encode(long clip_id) const = 0;
  /// `grads` may be null (frozen or not trainable).
  virtual std::vector<Var> encode(Graph& graph, long clip_id, Gradients* grads) const = 0;
  /// Trainable parameters, or null for encoders that cannot be trained.
  virtual ParameterSet* parameters() { return nullptr; }
};

class ToyClipEncoder : public ClipEncoder {
 public:
  ToyClipEncoder(ToyPatchEncoder& encoder, const ingest::PixelCache& pixels)
      : encoder_(encoder), pixels_(pixels) {}

  int d_model() const override { return encoder_.config().d_model; }
  std::vector<FrameTokens> encode(long clip_id) const override;
  std::vector<Var> encode(Graph& graph, long clip_id, Gradients* grads) const override;
  ParameterSet* parameters() override { return &encoder_.params(); }

 private:
  ToyPatchEncoder& encoder_;
  const ingest::PixelCache& pixels_;
};

/// Serves tokens from an imported embedding store verbatim.
class PrecomputedClipEncoder : public ClipEncoder {
 public:
  explicit PrecomputedClipEncoder(const EmbeddingStore& store) : store_(store) {}

  int d_model() const override { return static_cast<int>(store_.d_model()); }
  std::vector<FrameTokens> encode(long clip_id) const override;
  std::vector<Var> encode(Graph& graph, long clip_id, Gradients* grads) const override;

 private:
  const EmbeddingStore& store_;
};

}  // namespace rovf::encoders
