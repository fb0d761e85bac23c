// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace rovf::cli {

/// Standalone SVG line chart of y against x with min/max axis labels.
std::string line_plot_svg(const std::vector<double>& x, const std::vector<double>& y,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label);

}  // namespace rovf::cli
