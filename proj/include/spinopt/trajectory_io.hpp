#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "spinopt/perception.hpp"

namespace spinopt {

/// Line-delimited trajectory file:
///   {"fps": 30, "frames": T, "units": "m"}
///   {"t": <s>, "points": [[x, y, z], ...]}      (T records)
struct TrajectoryFile {
  double fps = 30.0;
  std::vector<TrajectoryFrame> frames;
};

/// Throws ContractError if any coordinate or time is non-finite.
void write_trajectory(std::ostream& os, const TrajectoryFile& traj);
void write_trajectory(const std::filesystem::path& path, const TrajectoryFile& traj);

/// Throws ParseError carrying the 1-based line number of the bad record.
TrajectoryFile read_trajectory(std::istream& is);
TrajectoryFile read_trajectory(const std::filesystem::path& path);

/// Test-tooling sidecar next to an exported trajectory; replay never reads it.
struct GroundTruthSidecar {
  std::vector<double> ground_truth_theta;
  std::optional<int> dropped_at;
  bool caught = false;
};

std::filesystem::path sidecar_path(const std::filesystem::path& trajectory_path);
void write_sidecar(const std::filesystem::path& path, const GroundTruthSidecar& sidecar);
GroundTruthSidecar read_sidecar(const std::filesystem::path& path);

}  // namespace spinopt
