#pragma once

// Command-line front end.  Subcommands:
//
//   solve2d --config <path> [--out <dir>]   2-D evolution + run manifest
//   reduce  --config <path>                 reduction pipeline + reports
//   verify  --what conservation|symmetry|roundtrip|reduction --config <path>
//   ermakov --omega2 <spec> --K <v> --rho0 <v> --drho0 <v> --t1 <v> --dt <v>
//   bracket --set constant --config <path>
//
// Exit codes: 0 success, 1 contract/usage/configuration errors, 2 a
// verification verdict of "defect" (a first-class outcome, not a crash).
// Output directory precedence: --out flag, then QBM_OUTPUT_DIR, then the
// configuration's [output] directory.  Reports are deterministic: no
// timestamps, no absolute paths.

#include <string>
#include <vector>

namespace qbm {

/// Run the CLI on pre-split arguments (argv without the program name).
int run(const std::vector<std::string>& args);

} // namespace qbm
