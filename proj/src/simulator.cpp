#include "spinopt/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPointsPerRing = 4;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool in_stall_sector(double theta) {
  double phase = std::fmod(theta, kTwoPi);
  if (phase < 0.0) phase += kTwoPi;
  return phase > 0.5 * std::numbers::pi && phase < 1.5 * std::numbers::pi;
}

// Rings of four points at quarter turns keep the sampled body-frame
// covariance exactly diagonal, so a noiseless render has its principal axis
// exactly on the rod axis.
TrajectoryFrame render_frame(std::size_t k, double t, double theta, bool fallen,
                             double grasp_offset, const ObjectModel& obj, const SimConfig& cfg) {
  std::mt19937_64 rng(mix(cfg.seed ^ mix(0xF00DULL + k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);

  const int rings = cfg.surface_points / kPointsPerRing;
  const double ring_pitch = obj.length / rings;
  const double u_min = -grasp_offset - 0.5 * obj.length;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Eigen::Vector3d offset = fallen ? cfg.drop_offset : Eigen::Vector3d::Zero();

  TrajectoryFrame frame;
  frame.t = t;
  frame.points.reserve(static_cast<std::size_t>(rings * kPointsPerRing));
  for (int j = 0; j < rings; ++j) {
    const double u = u_min + (j + unit(rng)) * ring_pitch;
    const double phase0 = kTwoPi * unit(rng);
    for (int q = 0; q < kPointsPerRing; ++q) {
      const double phi = phase0 + q * 0.5 * std::numbers::pi;
      const double bx = u;
      const double by = obj.radius * std::cos(phi);
      const double bz = obj.radius * std::sin(phi);
      Point3 p = cfg.pivot + offset + Point3(bx * c - by * s, bx * s + by * c, bz);
      if (cfg.noise_sigma > 0.0) {
        p += Point3(noise(rng), noise(rng), noise(rng));
      }
      frame.points.push_back(p);
    }
  }
  return frame;
}

}  // namespace

void ObjectModel::validate() const {
  if (!(length > 0.0) || !(radius > 0.0) || !(mass > 0.0)) {
    throw ConfigError("object '" + name + "': length, radius and mass must be positive");
  }
  if (!(std::abs(com_offset) < 0.5 * length)) {
    throw ConfigError("object '" + name + "': |com_offset| must be below length/2");
  }
}

ObjectModel object_preset(std::string_view name) {
  // Centre-of-mass offsets other than pen1 are calibration values; only their
  // direction is known.
  if (name == "pen1") return {"pen1", 0.304, 0.00425, 0.038, 0.0};
  if (name == "pen2") return {"pen2", 0.304, 0.00425, 0.026, 0.04};
  if (name == "pen3") return {"pen3", 0.304, 0.00425, 0.026, -0.04};
  if (name == "screwdriver") return {"screwdriver", 0.216, 0.01215, 0.038, 0.05};
  if (name == "brush") return {"brush", 0.352, 0.007, 0.042, 0.06};
  throw ConfigError("unknown object preset '" + std::string(name) + "'");
}

std::vector<std::string> object_preset_names() {
  return {"pen1", "pen2", "pen3", "screwdriver", "brush"};
}

void SimConfig::validate() const {
  if (!(fps >= 1.0)) throw ConfigError("sim.fps must be >= 1");
  if (!(episode_duration > 0.0)) throw ConfigError("sim.episode_duration must be positive");
  if (!(impulse_gain > 0.0)) throw ConfigError("sim.impulse_gain must be positive");
  if (!(drag_rate > 0.0)) throw ConfigError("sim.drag_rate must be positive");
  if (!(stall_speed > 0.0)) throw ConfigError("sim.stall_speed must be positive");
  if (!(catch_window > 0.0)) throw ConfigError("sim.catch_window must be positive");
  if (!(grasp_slip_limit > 0.0)) throw ConfigError("sim.grasp_slip_limit must be positive");
  if (!(noise_sigma >= 0.0)) throw ConfigError("sim.noise_sigma must be >= 0");
  if (surface_points < 8 || surface_points % kPointsPerRing != 0) {
    throw ConfigError("sim.surface_points must be a multiple of 4 and at least 8");
  }
  for (double w : drive_weights) {
    if (!(w > 0.0)) throw ConfigError("sim.drive_weights must be positive");
  }
}

std::size_t frame_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::floor(cfg.fps * cfg.episode_duration + 1e-9)) + 1;
}

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::kNone: return "none";
    case DropCause::kSlip: return "slip";
    case DropCause::kStall: return "stall";
    case DropCause::kOvershoot: return "overshoot";
    case DropCause::kCatchMiss: return "catch_miss";
  }
  return "unknown";
}

double SpinDynamics::angle(double t) const { return -(omega0 / drag_rate) * std::expm1(-drag_rate * t); }

double SpinDynamics::rate(double t) const { return omega0 * std::exp(-drag_rate * t); }

SpinDynamics spin_dynamics(const PhysicalAction& action, const ObjectModel& obj,
                           const SimConfig& cfg) {
  SpinDynamics d;
  d.lever = action.grasp_offset_m - obj.com_offset;
  d.inertia = obj.mass * obj.length * obj.length / 12.0 + obj.mass * d.lever * d.lever;
  double drive = 0.0;
  for (std::size_t i = 0; i < kServoCount; ++i) drive += cfg.drive_weights[i] * action.servo_deltas_deg[i];
  d.impulse = cfg.impulse_gain * drive;
  d.omega0 = d.impulse / d.inertia;
  d.drag_rate = cfg.drag_rate;
  return d;
}

EpisodeResult simulate(const PhysicalAction& action, const ObjectModel& obj, const SimConfig& cfg) {
  cfg.validate();
  obj.validate();
  if (!(std::abs(action.grasp_offset_m) < 0.5 * obj.length)) {
    throw SimulationInputError("grasp offset lies off the object");
  }
  if (!(action.delay_s > 0.0) || !(action.delay_s < cfg.episode_duration)) {
    throw SimulationInputError("catch delay must lie inside the episode");
  }

  EpisodeResult out;
  out.dynamics = spin_dynamics(action, obj, cfg);
  const SpinDynamics& dyn = out.dynamics;
  const std::size_t frames = frame_count(cfg);
  const double t_catch = action.delay_s;
  auto frame_time = [&](std::size_t k) { return static_cast<double>(k) / cfg.fps; };

  if (std::abs(dyn.lever) > cfg.grasp_slip_limit) {
    out.dropped_at = 0;
    out.drop_cause = DropCause::kSlip;
  } else {
    for (std::size_t k = 0; k < frames && frame_time(k) <= t_catch; ++k) {
      const double t = frame_time(k);
      const double theta = dyn.angle(t);
      if (std::abs(dyn.rate(t)) < cfg.stall_speed && in_stall_sector(theta)) {
        out.dropped_at = static_cast<int>(k);
        out.drop_cause = DropCause::kStall;
        break;
      }
      if (std::abs(theta) > kTwoPi + cfg.catch_window) {
        out.dropped_at = static_cast<int>(k);
        out.drop_cause = DropCause::kOvershoot;
        break;
      }
    }
    if (!out.dropped_at) {
      if (std::abs(dyn.angle(t_catch) - kTwoPi) <= cfg.catch_window) {
        out.caught = true;
      } else {
        std::size_t k = 0;
        while (k < frames && frame_time(k) <= t_catch) ++k;
        if (k < frames) out.dropped_at = static_cast<int>(k);
        out.drop_cause = DropCause::kCatchMiss;
      }
    }
  }

  out.trajectory.reserve(frames);
  out.ground_truth_theta.reserve(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = frame_time(k);
    const double theta = out.drop_cause == DropCause::kSlip ? 0.0 : dyn.angle(std::min(t, t_catch));
    const bool fallen = out.dropped_at && static_cast<int>(k) >= *out.dropped_at;
    out.ground_truth_theta.push_back(theta);
    out.trajectory.push_back(render_frame(k, t, theta, fallen, action.grasp_offset_m, obj, cfg));
  }
  return out;
}

ActionEvaluation evaluate_action(const ActionParams& a, const ObjectModel& obj,
                                 const ScalingConfig& scaling, const SimConfig& sim,
                                 const FilterConfig& filter, const RewardConfig& reward) {
  const PhysicalAction physical = denormalize(a, scaling);
  const EpisodeResult episode = simulate(physical, obj, sim);
  const ObservedTrajectory observed = observe_trajectory(episode.trajectory, filter);
  ActionEvaluation ev;
  ev.reward = objective(observed.observations, reward);
  ev.success = label_success(observed.observations, reward);
  return ev;
}

}  // namespace spinopt
