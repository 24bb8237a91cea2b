#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace spinopt {

inline constexpr std::size_t kServoCount = 6;
/// Flattened layout: six servo deltas, catch delay, grasp offset.
inline constexpr std::size_t kActionDim = 8;
/// (s, d) only, grasp pinned at the pen centre.
inline constexpr std::size_t kNoGraspDim = 7;
inline constexpr double kBoxLower = -1.0;
inline constexpr double kBoxUpper = 1.0;

using ServoVector = std::array<double, kServoCount>;
using ActionVector = std::array<double, kActionDim>;

/// Normalized action. Servo order is [m1a, m1b, m2a, m2b, m3a, m3b].
struct ActionParams {
  ServoVector servo{};
  double delay = 0.0;
  double grasp = 0.0;

  /// Rejects any component outside [-1, 1] with a BoundsError.
  static ActionParams from_vector(std::span<const double> v);
  ActionVector to_vector() const;

  bool operator==(const ActionParams&) const = default;
};

struct PhysicalAction {
  ServoVector servo_deltas_deg{};
  double delay_s = 0.0;
  /// Signed displacement of the grasp point from the pen centre along its axis.
  double grasp_offset_m = 0.0;
};

struct ScalingConfig {
  ServoVector servo_scales_deg{30.0, 35.0, 70.0, 70.0, 35.0, 45.0};
  double delay_gain = 0.2;
  double delay_bias = 0.7;
  double grasp_max_m = 0.10;

  /// Throws ConfigError on non-positive scales or a delay map reaching zero.
  void validate() const;
};

/// Finger m1 motion that closes the catch: the spin deltas of m1, negated.
struct CatchAction {
  std::array<double, 2> m1_deltas_deg{};
};

/// The heuristic starting action used to seed every optimization run.
ActionParams initial_action();

PhysicalAction denormalize(const ActionParams& a, const ScalingConfig& c);
ActionParams normalize(const PhysicalAction& p, const ScalingConfig& c);
CatchAction catch_action(const PhysicalAction& p);

/// L-infinity projection of a raw 8-vector onto the normalized box.
ActionParams clamp_to_bounds(std::span<const double> v);

}  // namespace spinopt
