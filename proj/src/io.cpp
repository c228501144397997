#include "eps/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eps {

nlohmann::json algebra_to_json(const LieAlgebra& alg) {
  nlohmann::json structure = nlohmann::json::array();
  for (int i = 0; i < alg.dim(); ++i) {
    nlohmann::json plane = nlohmann::json::array();
    for (int j = 0; j < alg.dim(); ++j) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < alg.dim(); ++k) row.push_back(alg.structure(i, j, k));
      plane.push_back(std::move(row));
    }
    structure.push_back(std::move(plane));
  }
  return nlohmann::json{{"name", alg.name()},
                        {"dim", alg.dim()},
                        {"rank", alg.rank()},
                        {"labels", alg.labels()},
                        {"structure", std::move(structure)}};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string trajectory_csv(const Trajectory& traj) {
  if (traj.size() == 0) throw std::invalid_argument("trajectory_csv: empty trajectory");
  const int n = static_cast<int>(traj.states.front().size());
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",H,F,constraint_max\n";
  const auto& H = traj.monitors.at("H");
  const auto& F = traj.monitors.at("F");
  const auto& C = traj.monitors.at("constraint_max");
  for (int k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i) out << ',' << format_double(traj.states[k](i));
    out << ',' << format_double(H[k]) << ',' << format_double(F[k]) << ','
        << format_double(C[k]) << '\n';
  }
  return out.str();
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trajectory_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("read_trajectory_csv: empty file " + path);
  int cols = 1;
  for (char c : header)
    if (c == ',') ++cols;
  const int n = cols - 4;  // t, x_1..x_n, H, F, constraint_max
  if (n < 1) throw std::runtime_error("read_trajectory_csv: malformed header");

  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != cols)
      throw std::runtime_error("read_trajectory_csv: ragged row");
    if (!traj.times.empty() && !(vals[0] > traj.times.back()))
      throw std::runtime_error("read_trajectory_csv: times not strictly increasing");
    traj.times.push_back(vals[0]);
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = vals[1 + i];
    traj.states.push_back(x);
    traj.monitors["H"].push_back(vals[n + 1]);
    traj.monitors["F"].push_back(vals[n + 2]);
    traj.monitors["constraint_max"].push_back(vals[n + 3]);
  }
  return traj;
}

std::string group_trajectory_csv(const GroupTrajectory& traj, bool complex_entries) {
  if (traj.size() == 0)
    throw std::invalid_argument("group_trajectory_csv: empty trajectory");
  const int n = static_cast<int>(traj.elements.front().rows());
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (complex_entries)
        out << ",g_" << i << j << "_re,g_" << i << j << "_im";
      else
        out << ",g_" << i << j;
    }
  out << '\n';
  for (int k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out << ',' << format_double(traj.elements[k](i, j).real());
        if (complex_entries)
          out << ',' << format_double(traj.elements[k](i, j).imag());
      }
    out << '\n';
  }
  return out.str();
}

}  // namespace eps
