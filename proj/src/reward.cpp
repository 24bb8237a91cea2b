#include "spinopt/reward.hpp"

#include <cmath>
#include <numbers>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool has_angle(const PenObservation& o) { return o.present && o.theta_z.has_value(); }

}  // namespace

void RewardConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("reward.lambda must be >= 0");
  if (!(rotation_tolerance >= 0.0)) throw ConfigError("reward.rotation_tolerance must be >= 0");
  if (tail_frames < 0) throw ConfigError("reward.tail_frames must be >= 0");
}

double wrap_angle(double radians) {
  const double r = std::remainder(radians, kTwoPi);
  return r <= -std::numbers::pi ? r + kTwoPi : r;
}

double net_rotation(std::span<const PenObservation> obs) {
  double total = 0.0;
  for (std::size_t t = 1; t < obs.size(); ++t) {
    if (has_angle(obs[t]) && has_angle(obs[t - 1])) {
      total += wrap_angle(*obs[t].theta_z - *obs[t - 1].theta_z);
    }
  }
  return total;
}

double rotation_reward(std::span<const PenObservation> obs) { return net_rotation(obs) / kTwoPi; }

double fall_penalty(std::span<const PenObservation> obs) {
  if (obs.empty()) throw ContractError("fall_penalty: empty observation list");
  std::size_t absent = 0;
  for (const PenObservation& o : obs) absent += o.present ? 0 : 1;
  return static_cast<double>(absent) / static_cast<double>(obs.size());
}

RewardBreakdown objective(std::span<const PenObservation> obs, const RewardConfig& cfg) {
  cfg.validate();
  RewardBreakdown b;
  b.p_fall = fall_penalty(obs);
  b.r_rot = rotation_reward(obs);
  b.r = b.r_rot - cfg.lambda * b.p_fall;
  return b;
}

bool label_success(std::span<const PenObservation> obs, const RewardConfig& cfg) {
  if (obs.empty()) throw ContractError("label_success: empty observation list");
  const std::size_t tail = static_cast<std::size_t>(cfg.tail_frames);
  if (obs.size() < tail) return false;
  for (std::size_t i = obs.size() - tail; i < obs.size(); ++i) {
    if (!obs[i].present) return false;
  }
  return net_rotation(obs) >= kTwoPi - cfg.rotation_tolerance;
}

}  // namespace spinopt
