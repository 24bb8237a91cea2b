#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "spinopt/action_space.hpp"
#include "spinopt/campaign.hpp"
#include "spinopt/cma_es.hpp"
#include "spinopt/config.hpp"
#include "spinopt/errors.hpp"
#include "spinopt/perception.hpp"
#include "spinopt/reward.hpp"
#include "spinopt/simulator.hpp"

namespace py = pybind11;
using namespace spinopt;

namespace {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

std::vector<Point3> to_points(const PointMatrix& m) {
  std::vector<Point3> pts;
  pts.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) pts.emplace_back(m(i, 0), m(i, 1), m(i, 2));
  return pts;
}

PointMatrix from_points(const std::vector<Point3>& pts) {
  PointMatrix m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return m;
}

// Angles with None marking absent frames.
std::vector<PenObservation> observations_from_angles(const std::vector<std::optional<double>>& theta_z) {
  std::vector<PenObservation> obs(theta_z.size());
  for (std::size_t i = 0; i < theta_z.size(); ++i) {
    if (theta_z[i]) {
      obs[i].present = true;
      obs[i].theta_z = theta_z[i];
    }
  }
  return obs;
}

py::dict breakdown_dict(const RewardBreakdown& b) {
  py::dict d;
  d["r_rot"] = b.r_rot;
  d["p_fall"] = b.p_fall;
  d["r"] = b.r;
  return d;
}

PipelineConfig pipeline_from(const std::optional<std::string>& config_json) {
  return config_json ? parse_pipeline_config(*config_json) : PipelineConfig{};
}

ObjectModel object_from(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return object_preset(obj.cast<std::string>());
  return obj.cast<ObjectModel>();
}

/// Stateful wrapper over the functional ask/tell API.
class Optimizer {
 public:
  Optimizer(const Eigen::VectorXd& mean, double sigma0, std::optional<int> population_size,
            std::uint64_t seed)
      : state_(cmaes::init(mean, sigma0,
                           population_size.value_or(cmaes::default_population_size(static_cast<int>(mean.size()))),
                           seed)) {}

  std::vector<Eigen::VectorXd> ask() {
    pending_ = cmaes::ask(state_);
    std::vector<Eigen::VectorXd> out;
    for (const auto& c : pending_) out.push_back(c.params);
    return out;
  }

  std::vector<Eigen::VectorXd> raw() const {
    std::vector<Eigen::VectorXd> out;
    for (const auto& c : pending_) out.push_back(c.raw);
    return out;
  }

  void tell(const std::vector<double>& fitness) {
    if (pending_.empty()) throw ContractError("tell called before ask");
    if (fitness.size() != pending_.size()) {
      throw ContractError("tell expects " + std::to_string(pending_.size()) + " fitness values");
    }
    for (std::size_t i = 0; i < fitness.size(); ++i) pending_[i].fitness = fitness[i];
    state_ = cmaes::tell(state_, pending_);
    pending_.clear();
  }

  py::tuple best() const {
    const auto b = cmaes::best_so_far(state_);
    return py::make_tuple(b.params, b.fitness);
  }

  const cmaes::OptimizerState& state() const { return state_; }

 private:
  cmaes::OptimizerState state_;
  std::vector<cmaes::Candidate> pending_;
};

}  // namespace

PYBIND11_MODULE(_spinopt, m) {
  m.doc() = "Spin-action optimization: CMA-ES, point-cloud perception, reward and surrogate simulator.";

  auto base = py::register_exception<Error>(m, "SpinoptError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<BoundsError>(m, "BoundsError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SimulationInputError>(m, "SimulationInputError", base.ptr());
  py::register_exception<DegenerateGeometryError>(m, "DegenerateGeometryError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.attr("ACTION_DIM") = kActionDim;

  py::class_<ActionParams>(m, "ActionParams")
      .def(py::init<>())
      .def_readwrite("servo", &ActionParams::servo)
      .def_readwrite("delay", &ActionParams::delay)
      .def_readwrite("grasp", &ActionParams::grasp)
      .def_static("from_vector", [](const std::vector<double>& v) { return ActionParams::from_vector(v); })
      .def("to_vector", &ActionParams::to_vector)
      .def(py::self == py::self)
      .def("__repr__", [](const ActionParams& a) {
        return "ActionParams(" + py::repr(py::cast(a.to_vector())).cast<std::string>() + ")";
      });

  py::class_<PhysicalAction>(m, "PhysicalAction")
      .def(py::init<>())
      .def_readwrite("servo_deltas_deg", &PhysicalAction::servo_deltas_deg)
      .def_readwrite("delay_s", &PhysicalAction::delay_s)
      .def_readwrite("grasp_offset_m", &PhysicalAction::grasp_offset_m);

  py::class_<ScalingConfig>(m, "ScalingConfig")
      .def(py::init<>())
      .def_readwrite("servo_scales_deg", &ScalingConfig::servo_scales_deg)
      .def_readwrite("delay_gain", &ScalingConfig::delay_gain)
      .def_readwrite("delay_bias", &ScalingConfig::delay_bias)
      .def_readwrite("grasp_max_m", &ScalingConfig::grasp_max_m);

  py::class_<ObjectModel>(m, "ObjectModel")
      .def(py::init<>())
      .def_readwrite("name", &ObjectModel::name)
      .def_readwrite("length", &ObjectModel::length)
      .def_readwrite("radius", &ObjectModel::radius)
      .def_readwrite("mass", &ObjectModel::mass)
      .def_readwrite("com_offset", &ObjectModel::com_offset);

  m.def("initial_action", &initial_action);
  m.def("denormalize", &denormalize, py::arg("params"), py::arg("scaling") = ScalingConfig{});
  m.def("normalize", &normalize, py::arg("physical"), py::arg("scaling") = ScalingConfig{});
  m.def("catch_action", [](const PhysicalAction& p) { return catch_action(p).m1_deltas_deg; });
  m.def("clamp_to_bounds", [](const std::vector<double>& v) { return clamp_to_bounds(v); });

  m.def("default_population_size", &cmaes::default_population_size, py::arg("n"));
  py::class_<Optimizer>(m, "Optimizer")
      .def(py::init<const Eigen::VectorXd&, double, std::optional<int>, std::uint64_t>(), py::arg("mean"),
           py::arg("sigma0") = 0.3, py::arg("population_size") = py::none(), py::arg("seed") = kDefaultSeed)
      .def("ask", &Optimizer::ask, "Box-clamped candidates for this generation.")
      .def("raw", &Optimizer::raw, "Pre-clamp samples of the pending generation.")
      .def("tell", &Optimizer::tell, py::arg("fitness"), "Fitness values to maximize, in ask order.")
      .def("best", &Optimizer::best)
      .def_property_readonly("generation", [](const Optimizer& o) { return o.state().generation; })
      .def_property_readonly("sigma", [](const Optimizer& o) { return o.state().sigma; })
      .def_property_readonly("mean", [](const Optimizer& o) { return o.state().mean; })
      .def_property_readonly("covariance", [](const Optimizer& o) { return o.state().covariance; })
      .def_property_readonly("population_size",
                             [](const Optimizer& o) { return o.state().strategy.population_size; });

  m.def("principal_axis", [](const PointMatrix& pts) {
    const auto v = to_points(pts);
    return Eigen::Vector3d(principal_axis(v));
  });
  m.def("euler_angles", [](const Eigen::Vector3d& axis) {
    const EulerAngles e = euler_angles(axis);
    return py::make_tuple(e.theta_x, e.theta_y, e.theta_z);
  });
  m.def(
      "observe",
      [](const std::vector<double>& times, const std::vector<PointMatrix>& frames) {
        if (times.size() != frames.size()) throw ContractError("times and frames differ in length");
        std::vector<TrajectoryFrame> traj;
        for (std::size_t i = 0; i < frames.size(); ++i) traj.push_back({times[i], to_points(frames[i])});
        const ObservedTrajectory obs = observe_trajectory(traj, FilterConfig{});
        py::list out;
        for (const PenObservation& o : obs.observations) {
          py::dict d;
          d["present"] = o.present;
          d["point_count"] = o.point_count;
          d["theta_z"] = o.theta_z;
          d["axis"] = o.axis;
          out.append(d);
        }
        return out;
      },
      py::arg("times"), py::arg("frames"), "Per-frame presence and angles with the default filter.");

  m.def(
      "objective",
      [](const std::vector<std::optional<double>>& theta_z, double lambda) {
        RewardConfig cfg;
        cfg.lambda = lambda;
        return breakdown_dict(objective(observations_from_angles(theta_z), cfg));
      },
      py::arg("theta_z"), py::arg("lambda_weight") = 1.0, "theta_z per frame; None marks an absent frame.");
  m.def(
      "label_success",
      [](const std::vector<std::optional<double>>& theta_z) {
        return label_success(observations_from_angles(theta_z));
      },
      py::arg("theta_z"));
  m.def("wrap_angle", &wrap_angle);

  m.def("object_preset", [](const std::string& name) { return object_preset(name); });
  m.def("object_preset_names", &object_preset_names);

  m.def(
      "simulate",
      [](const ActionParams& params, const py::object& object, std::optional<std::string> config_json,
         std::optional<std::uint64_t> seed) {
        PipelineConfig p = pipeline_from(config_json);
        if (seed) p.sim.seed = *seed;
        const EpisodeResult r = simulate(denormalize(params, p.scaling), object_from(object), p.sim);
        py::dict d;
        py::list times;
        py::list frames;
        for (const TrajectoryFrame& f : r.trajectory) {
          times.append(f.t);
          frames.append(from_points(f.points));
        }
        d["times"] = times;
        d["frames"] = frames;
        d["ground_truth_theta"] = r.ground_truth_theta;
        d["dropped_at"] = r.dropped_at;
        d["caught"] = r.caught;
        d["drop_cause"] = std::string(to_string(r.drop_cause));
        d["omega0"] = r.dynamics.omega0;
        return d;
      },
      py::arg("params"), py::arg("object") = "pen1", py::arg("config_json") = py::none(),
      py::arg("seed") = py::none());

  m.def(
      "evaluate_action",
      [](const ActionParams& params, const py::object& object, std::optional<std::string> config_json) {
        const PipelineConfig p = pipeline_from(config_json);
        const ActionEvaluation ev =
            evaluate_action(params, object_from(object), p.scaling, p.sim, p.filter, p.reward);
        py::dict d = breakdown_dict(ev.reward);
        d["success"] = ev.success;
        return d;
      },
      py::arg("params"), py::arg("object") = "pen1", py::arg("config_json") = py::none());

  m.def(
      "run_campaign",
      [](const std::string& config_json) {
        const CampaignConfig cfg = parse_campaign_config(config_json);
        CampaignReport r;
        {
          py::gil_scoped_release release;
          r = run_campaign(cfg);
        }
        py::dict d;
        d["object"] = r.object;
        d["mode"] = std::string(to_string(r.mode));
        d["evaluations"] = r.evaluations;
        d["population_size"] = r.population_size;
        d["generations"] = r.generations;
        d["best_params"] = r.best_params.to_vector();
        d["best_fitness"] = r.best_fitness;
        d["first_success_generation"] = r.first_success_generation;
        d["success_candidates"] = r.success_candidates;
        d["out_dir"] = r.out_dir;
        return d;
      },
      py::arg("config_json"), "Runs a campaign from JSON config text and writes its logs.");

  m.def(
      "replay",
      [](const std::filesystem::path& path, std::optional<double> lambda, std::optional<std::string> config_json) {
        PipelineConfig p = pipeline_from(config_json);
        if (lambda) p.reward.lambda = *lambda;
        const ReplayResult r = replay(path, p.filter, p.reward);
        py::dict d = breakdown_dict(r.reward);
        d["success"] = r.success;
        d["frames"] = r.frames;
        return d;
      },
      py::arg("trajectory"), py::arg("lambda_weight") = py::none(), py::arg("config_json") = py::none());

  m.def(
      "export_episode",
      [](const ActionParams& params, const py::object& object, const std::filesystem::path& path,
         std::optional<std::string> config_json) {
        export_episode(params, object_from(object), pipeline_from(config_json), path);
      },
      py::arg("params"), py::arg("object"), py::arg("path"), py::arg("config_json") = py::none());
}
