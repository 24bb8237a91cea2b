#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace spinopt {

using Point3 = Eigen::Vector3d;

/// One camera frame of segmented pen points (camera frame, metres).
struct TrajectoryFrame {
  double t = 0.0;
  std::vector<Point3> points;
};

/// Fingertip bounding box and the point count that separates "present" from "dropped".
struct FilterConfig {
  Point3 bbox_min{-0.3, -0.3, 0.2};
  Point3 bbox_max{0.3, 0.3, 0.5};
  int presence_threshold = 50;

  void validate() const;
};

struct EulerAngles {
  std::optional<double> theta_x;
  std::optional<double> theta_y;
  std::optional<double> theta_z;
};

struct PenObservation {
  std::optional<Eigen::Vector3d> axis;
  std::optional<double> theta_x;
  std::optional<double> theta_y;
  std::optional<double> theta_z;
  int point_count = 0;
  bool present = false;
};

struct ObservedTrajectory {
  std::vector<PenObservation> observations;
  /// Frames above the presence threshold whose PCA was degenerate.
  std::size_t degenerate_frames = 0;
};

/// Points inside the closed box, in input order.
std::vector<Point3> filter_points(const TrajectoryFrame& frame, const FilterConfig& cfg);

/// Largest-variance direction of the point set, canonical sign (first
/// nonzero component positive). Throws DegenerateGeometryError on fewer than
/// two points or zero spread.
Eigen::Vector3d principal_axis(std::span<const Point3> points);

/// Plane-projection angles: theta_z = atan2(vy, vx), theta_x = atan2(vz, vy),
/// theta_y = atan2(vx, vz). An angle is empty when its projection vanishes.
EulerAngles euler_angles(const Eigen::Vector3d& axis);

/// filter -> presence -> PCA -> sign continuity -> angles, frame by frame.
ObservedTrajectory observe_trajectory(std::span<const TrajectoryFrame> frames,
                                      const FilterConfig& cfg);

}  // namespace spinopt
