#pragma once

#include <span>

#include "spinopt/perception.hpp"

namespace spinopt {

struct RewardConfig {
  /// Weight of the fall penalty in r = r_rot - lambda * p_fall.
  double lambda = 1.0;
  /// Automated success label: rotation >= 2*pi - rotation_tolerance ...
  double rotation_tolerance = 0.1;
  /// ... and the last `tail_frames` frames present.
  int tail_frames = 5;

  void validate() const;
};

struct RewardBreakdown {
  double r_rot = 0.0;
  double p_fall = 0.0;
  double r = 0.0;
};

/// Wraps into (-pi, pi].
double wrap_angle(double radians);

/// Signed net rotation about camera z, in radians. Only steps whose two
/// endpoint frames are both present (with a defined theta_z) contribute.
double net_rotation(std::span<const PenObservation> obs);

/// net_rotation / 2*pi. Zero for empty or all-absent input.
double rotation_reward(std::span<const PenObservation> obs);

/// Fraction of frames in which the pen is absent. Throws ContractError on empty input.
double fall_penalty(std::span<const PenObservation> obs);

RewardBreakdown objective(std::span<const PenObservation> obs, const RewardConfig& cfg);

bool label_success(std::span<const PenObservation> obs, const RewardConfig& cfg = {});

}  // namespace spinopt
