#include "spinopt/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

constexpr double kZeroComponent = 1e-12;
constexpr double kZeroProjection = 1e-12;

std::optional<double> projected_angle(double y, double x) {
  if (std::hypot(x, y) < kZeroProjection) return std::nullopt;
  return std::atan2(y, x);
}

}  // namespace

void FilterConfig::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(bbox_min[i] < bbox_max[i])) {
      throw ConfigError("filter.bbox_min must be below filter.bbox_max on every axis");
    }
  }
  if (presence_threshold < 1) throw ConfigError("filter.presence_threshold must be >= 1");
}

std::vector<Point3> filter_points(const TrajectoryFrame& frame, const FilterConfig& cfg) {
  std::vector<Point3> kept;
  kept.reserve(frame.points.size());
  for (const Point3& p : frame.points) {
    if ((p.array() >= cfg.bbox_min.array()).all() && (p.array() <= cfg.bbox_max.array()).all()) {
      kept.push_back(p);
    }
  }
  return kept;
}

Eigen::Vector3d principal_axis(std::span<const Point3> points) {
  if (points.size() < 2) {
    throw DegenerateGeometryError("principal_axis needs at least 2 points, got " +
                                  std::to_string(points.size()));
  }
  Point3 centroid = Point3::Zero();
  double magnitude = 1.0;
  for (const Point3& p : points) {
    centroid += p;
    magnitude = std::max(magnitude, p.cwiseAbs().maxCoeff());
  }
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Point3 d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  // Spread at the rounding level of the coordinates counts as zero.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  if (solver.info() != Eigen::Success || !(solver.eigenvalues()[2] > floor * floor)) {
    throw DegenerateGeometryError("point covariance is zero");
  }
  Eigen::Vector3d axis = solver.eigenvectors().col(2).normalized();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis[i]) > kZeroComponent) {
      if (axis[i] < 0.0) axis = -axis;
      break;
    }
  }
  return axis;
}

EulerAngles euler_angles(const Eigen::Vector3d& axis) {
  EulerAngles e;
  e.theta_z = projected_angle(axis.y(), axis.x());
  e.theta_x = projected_angle(axis.z(), axis.y());
  e.theta_y = projected_angle(axis.x(), axis.z());
  return e;
}

ObservedTrajectory observe_trajectory(std::span<const TrajectoryFrame> frames,
                                      const FilterConfig& cfg) {
  cfg.validate();
  ObservedTrajectory out;
  out.observations.reserve(frames.size());
  std::optional<Eigen::Vector3d> previous_axis;

  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (k > 0 && !(frames[k].t > frames[k - 1].t)) {
      throw ContractError("frame times must be strictly increasing (frame " + std::to_string(k) + ")");
    }
    const std::vector<Point3> kept = filter_points(frames[k], cfg);
    PenObservation obs;
    obs.point_count = static_cast<int>(kept.size());
    obs.present = obs.point_count > cfg.presence_threshold;

    if (obs.present) {
      try {
        Eigen::Vector3d axis = principal_axis(kept);
        if (previous_axis && axis.dot(*previous_axis) < 0.0) axis = -axis;
        const EulerAngles angles = euler_angles(axis);
        obs.axis = axis;
        obs.theta_x = angles.theta_x;
        obs.theta_y = angles.theta_y;
        obs.theta_z = angles.theta_z;
        previous_axis = axis;
      } catch (const DegenerateGeometryError&) {
        obs.present = false;
        ++out.degenerate_frames;
      }
    }
    out.observations.push_back(std::move(obs));
  }
  return out;
}

}  // namespace spinopt
