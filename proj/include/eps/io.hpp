#pragma once

#include <json.hpp>
#include <string>

#include "eps/dynamics.hpp"

namespace eps {

/// Algebra summary (labels + structure tensor) for cross-implementation
/// comparison; embedded in the CLI run summaries.
nlohmann::json algebra_to_json(const LieAlgebra& alg);

/// 17-significant-digit decimal rendering, enough to round-trip doubles.
std::string format_double(double v);

/// Write via a temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& contents);

/// Trajectory CSV: header t,x_1,...,x_n,H,F,constraint_max.
std::string trajectory_csv(const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

/// Group trajectory CSV: t,g_11,...,g_nn row-major for real groups;
/// complex groups interleave g_ij_re,g_ij_im columns.
std::string group_trajectory_csv(const GroupTrajectory& traj, bool complex_entries);

}  // namespace eps
