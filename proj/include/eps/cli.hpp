#pragma once

#include "eps/config.hpp"

namespace eps {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumerical = 3;

/// Integrate the configured instance; writes the trajectory CSV to `out`
/// and a run summary to `out`.summary.json.
int cmd_simulate(const RunConfig& cfg, const std::string& out);

/// Run one verification suite; the JSON report goes to stdout and, when
/// nonempty, to `out`.
int cmd_verify(const std::string& suite, const RunConfig& cfg, const std::string& out);

/// Solve the kinematic equation along a previously simulated trajectory.
int cmd_reconstruct(const RunConfig& cfg, const std::string& trajectory_csv,
                    const std::string& out);

/// Averaged frequencies and torus data of the configured pair instance.
int cmd_frequencies(const RunConfig& cfg, const std::string& out, bool crosscheck);

}  // namespace eps
