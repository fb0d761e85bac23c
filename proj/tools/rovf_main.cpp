// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/cli/cli.hpp"

int main(int argc, char** argv) { return rovf::cli::run_cli(argc, argv); }
