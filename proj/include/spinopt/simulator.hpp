#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinopt/action_space.hpp"
#include "spinopt/perception.hpp"
#include "spinopt/reward.hpp"

namespace spinopt {

struct ObjectModel {
  std::string name;
  double length = 0.304;   // m
  double radius = 0.00425; // m
  double mass = 0.038;     // kg
  /// Signed offset of the centre of mass from the geometric centre along the major axis.
  double com_offset = 0.0;

  void validate() const;
};

/// Built-in objects: pen1, pen2, pen3, screwdriver, brush.
ObjectModel object_preset(std::string_view name);
std::vector<std::string> object_preset_names();

/// Surrogate dynamics and rendering constants. The rotation model is
///   theta(t) = (omega0 / drag_rate) * (1 - exp(-drag_rate * t)),  t <= t_catch,
/// with omega0 = impulse_gain * sum(w_i * servo_deg_i) / I and
/// I = m L^2 / 12 + m a^2 about the grasp point (a = grasp - com_offset).
struct SimConfig {
  double fps = 30.0;
  double episode_duration = 2.0;  // s
  double impulse_gain = 3.5e-5;   // N m s per degree
  ServoVector drive_weights{0.1, 0.1, 1.0, 1.0, 0.5, 0.5};
  double drag_rate = 1.2;         // 1/s
  double stall_speed = 2.0;       // rad/s
  double catch_window = 0.6;      // rad, half-width around 2*pi
  double grasp_slip_limit = 0.03; // m
  int surface_points = 200;       // multiple of 4
  double noise_sigma = 0.0005;    // m
  std::uint64_t seed = 0;
  /// Grasp point in the camera frame; the rod spins about camera z through it.
  Point3 pivot{0.0, 0.0, 0.35};
  /// Translation applied to the rod once it has fallen.
  Eigen::Vector3d drop_offset{0.0, 1.0, 0.0};

  void validate() const;
};

/// floor(fps * episode_duration) + 1.
std::size_t frame_count(const SimConfig& cfg);

enum class DropCause { kNone, kSlip, kStall, kOvershoot, kCatchMiss };
std::string_view to_string(DropCause cause);

/// Closed-form spin of one action on one object.
struct SpinDynamics {
  double lever = 0.0;    // a, m
  double inertia = 0.0;  // kg m^2 about the grasp point
  double impulse = 0.0;  // N m s
  double omega0 = 0.0;   // rad/s
  double drag_rate = 0.0;

  double angle(double t) const;
  double rate(double t) const;
};

SpinDynamics spin_dynamics(const PhysicalAction& action, const ObjectModel& obj,
                           const SimConfig& cfg);

struct EpisodeResult {
  std::vector<TrajectoryFrame> trajectory;
  std::vector<double> ground_truth_theta;
  std::optional<int> dropped_at;
  bool caught = false;
  DropCause drop_cause = DropCause::kNone;
  SpinDynamics dynamics;
};

/// Deterministic given (action, object, config incl. seed). Throws
/// SimulationInputError when the grasp lies off the object or the catch delay
/// does not fit inside the episode.
EpisodeResult simulate(const PhysicalAction& action, const ObjectModel& obj, const SimConfig& cfg);

struct ActionEvaluation {
  RewardBreakdown reward;
  bool success = false;
};

/// denormalize -> simulate -> observe_trajectory -> objective + label_success.
/// The reward only ever sees the rendered point clouds.
ActionEvaluation evaluate_action(const ActionParams& a, const ObjectModel& obj,
                                 const ScalingConfig& scaling, const SimConfig& sim,
                                 const FilterConfig& filter, const RewardConfig& reward);

}  // namespace spinopt
