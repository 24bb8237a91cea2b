#include "spinopt/action_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

// Normalized values recovered from physical ones may land a few ulp outside
// the box; anything within this slack is accepted and clamped.
constexpr double kRoundTripSlack = 1e-9;

std::string servo_name(std::size_t i) { return "s[" + std::to_string(i) + "]"; }

void check_in_box(const std::string& name, double v) {
  if (!std::isfinite(v) || v < kBoxLower || v > kBoxUpper) throw BoundsError(name, v);
}

double accept_normalized(const std::string& name, double v) {
  if (!std::isfinite(v) || v < kBoxLower - kRoundTripSlack || v > kBoxUpper + kRoundTripSlack) {
    throw BoundsError(name, v);
  }
  return std::clamp(v, kBoxLower, kBoxUpper);
}

// Scaling constants come from decimal config text. Rounding the affine result
// to 15 significant digits lands the delay endpoints on the decimal bounds
// (0.5 and 0.9) instead of one ulp off.
double snap_decimal(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 14);
  double out = v;
  std::from_chars(buf, res.ptr, out, std::chars_format::scientific);
  return out;
}

}  // namespace

ActionParams ActionParams::from_vector(std::span<const double> v) {
  if (v.size() != kActionDim) {
    throw ContractError("action vector must have " + std::to_string(kActionDim) +
                        " components, got " + std::to_string(v.size()));
  }
  ActionParams a;
  for (std::size_t i = 0; i < kServoCount; ++i) {
    check_in_box(servo_name(i), v[i]);
    a.servo[i] = v[i];
  }
  check_in_box("d", v[6]);
  check_in_box("g", v[7]);
  a.delay = v[6];
  a.grasp = v[7];
  return a;
}

ActionVector ActionParams::to_vector() const {
  ActionVector v{};
  std::copy(servo.begin(), servo.end(), v.begin());
  v[6] = delay;
  v[7] = grasp;
  return v;
}

void ScalingConfig::validate() const {
  for (std::size_t i = 0; i < kServoCount; ++i) {
    if (!(servo_scales_deg[i] > 0.0) || !std::isfinite(servo_scales_deg[i])) {
      throw ConfigError("scaling.servo_scales_deg[" + std::to_string(i) + "] must be positive");
    }
  }
  if (!(delay_gain > 0.0)) throw ConfigError("scaling.delay_gain must be positive");
  if (!(delay_bias - delay_gain > 0.0)) {
    throw ConfigError("scaling.delay_bias - scaling.delay_gain must be positive");
  }
  if (!(grasp_max_m > 0.0)) throw ConfigError("scaling.grasp_max_m must be positive");
}

ActionParams initial_action() {
  ActionParams a;
  a.servo = {0.0, 0.0, 0.5, 1.0, 0.5, 1.0};
  a.delay = 0.0;
  a.grasp = 0.0;
  return a;
}

PhysicalAction denormalize(const ActionParams& a, const ScalingConfig& c) {
  c.validate();
  for (std::size_t i = 0; i < kServoCount; ++i) check_in_box(servo_name(i), a.servo[i]);
  check_in_box("d", a.delay);
  check_in_box("g", a.grasp);

  PhysicalAction p;
  for (std::size_t i = 0; i < kServoCount; ++i) {
    p.servo_deltas_deg[i] = a.servo[i] * c.servo_scales_deg[i];
  }
  p.delay_s = snap_decimal(c.delay_gain * a.delay + c.delay_bias);
  p.grasp_offset_m = a.grasp * c.grasp_max_m;
  return p;
}

ActionParams normalize(const PhysicalAction& p, const ScalingConfig& c) {
  c.validate();
  ActionParams a;
  for (std::size_t i = 0; i < kServoCount; ++i) {
    a.servo[i] = accept_normalized("servo_deltas_deg[" + std::to_string(i) + "]",
                                   p.servo_deltas_deg[i] / c.servo_scales_deg[i]);
  }
  a.delay = accept_normalized("delay_s", (p.delay_s - c.delay_bias) / c.delay_gain);
  a.grasp = accept_normalized("grasp_offset_m", p.grasp_offset_m / c.grasp_max_m);
  return a;
}

CatchAction catch_action(const PhysicalAction& p) {
  return CatchAction{{-p.servo_deltas_deg[0], -p.servo_deltas_deg[1]}};
}

ActionParams clamp_to_bounds(std::span<const double> v) {
  if (v.size() != kActionDim) {
    throw ContractError("action vector must have " + std::to_string(kActionDim) +
                        " components, got " + std::to_string(v.size()));
  }
  ActionVector out{};
  for (std::size_t i = 0; i < kActionDim; ++i) {
    // NaN maps to the box centre so a broken sample never escapes the box.
    out[i] = std::isnan(v[i]) ? 0.0 : std::clamp(v[i], kBoxLower, kBoxUpper);
  }
  return ActionParams::from_vector(out);
}

}  // namespace spinopt
