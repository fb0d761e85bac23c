// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rovf {

/// Input failed validation (bad file, bad config, broken invariant).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, long row, const std::string& what)
      : ValidationError(source + ":" + std::to_string(row) + ": " + what), row_(row) {}
  long row() const noexcept { return row_; }

 private:
  long row_;
};

/// The dataset cannot supply what an operation needs (no anchors, no negatives).
class IneligibleDataset : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A serialized artifact is corrupt or of the wrong kind.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace rovf
