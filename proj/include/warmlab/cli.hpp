// Copyright 2026 The warmlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Every command resolves its parameters with the
// precedence flag > config file > default, writes its data files under
// --out, and records a run.json manifest next to them.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "warmlab/graph.hpp"

namespace warmlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitCap = 3,
};

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `n q depth` lines (blank lines and # comments ignored).
std::vector<TreeBlock> parse_blocks(std::istream& in);

}  // namespace warmlab
