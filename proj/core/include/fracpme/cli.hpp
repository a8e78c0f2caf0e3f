// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace fracpme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverFailure = 3;

/// Entry point of the `fracpme` tool. Subcommands: run, selfsim,
/// fracpoisson, eig, sweep, schema. Returns 0 on success, 2 on a
/// configuration or usage error and 3 when the solver fails.
int cli_main(int argc, char** argv);

}  // namespace fracpme
