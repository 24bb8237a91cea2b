#include "spinopt/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spinopt/cma_es.hpp"
#include "spinopt/errors.hpp"
#include "spinopt/perception.hpp"

namespace spinopt {
namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x5EEDULL;
  for (std::uint64_t p : parts) h = mix(h ^ mix(p));
  return h;
}

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Scored {
  RewardBreakdown reward;
  bool success = false;
};

Scored score_candidate(const ActionParams& params, const ObjectModel& obj,
                       const PipelineConfig& pipeline, int trials, std::uint64_t seed) {
  Scored out;
  out.success = true;
  for (int k = 0; k < trials; ++k) {
    SimConfig sim = pipeline.sim;
    sim.seed = derive_seed({seed, static_cast<std::uint64_t>(k)});
    const ActionEvaluation ev =
        evaluate_action(params, obj, pipeline.scaling, sim, pipeline.filter, pipeline.reward);
    out.reward.r_rot += ev.reward.r_rot;
    out.reward.p_fall += ev.reward.p_fall;
    out.success = out.success && ev.success;
  }
  out.reward.r_rot /= trials;
  out.reward.p_fall /= trials;
  out.reward.r = out.reward.r_rot - pipeline.reward.lambda * out.reward.p_fall;
  return out;
}

ActionParams params_from_search(const Eigen::VectorXd& v) {
  ActionVector full{};
  for (Eigen::Index i = 0; i < v.size(); ++i) full[static_cast<std::size_t>(i)] = v[i];
  if (v.size() == static_cast<Eigen::Index>(kNoGraspDim)) full[7] = 0.0;
  return ActionParams::from_vector(full);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ojson params_json(const ActionParams& p) {
  const ActionVector v = p.to_vector();
  return ojson(std::vector<double>(v.begin(), v.end()));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory " + dir.string() + " is not writable");
  }
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.out_dir);

  const bool optimizing = cfg.mode == CampaignMode::kFull || cfg.mode == CampaignMode::kNoGrasp;
  const int dim = static_cast<int>(cfg.mode == CampaignMode::kNoGrasp ? kNoGraspDim : kActionDim);
  const int lambda = cfg.cmaes.population_size.value_or(cmaes::default_population_size(dim));

  ActionParams fixed = initial_action();
  if (cfg.mode == CampaignMode::kTransfer) {
    if (!std::filesystem::exists(*cfg.transfer_source)) {
      throw ConfigError("transfer source " + cfg.transfer_source->string() + " does not exist");
    }
    fixed = read_params_file(*cfg.transfer_source).params;
  }

  std::optional<cmaes::OptimizerState> state;
  if (optimizing) {
    const ActionVector init = initial_action().to_vector();
    Eigen::VectorXd mean0(dim);
    for (int i = 0; i < dim; ++i) mean0[i] = init[static_cast<std::size_t>(i)];
    state = cmaes::init(mean0, cfg.cmaes.sigma0, lambda, cfg.cmaes.seed);
  }

  std::ofstream candidates_out = open_out(cfg.out_dir / "candidates.jsonl");
  std::ofstream generations_out = open_out(cfg.out_dir / "generations.jsonl");

  CampaignReport report;
  report.object = cfg.object.name;
  report.mode = cfg.mode;
  report.population_size = lambda;
  report.generations = cfg.cmaes.generations;
  report.out_dir = cfg.out_dir;
  report.best_fitness = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  std::vector<double> best_trace;

  for (int g = 0; g < cfg.cmaes.generations; ++g) {
    const auto started = std::chrono::steady_clock::now();

    std::vector<cmaes::Candidate> asked;
    std::vector<ActionParams> params(static_cast<std::size_t>(lambda), fixed);
    GenerationLog glog;
    glog.generation = g;
    if (state) {
      asked = cmaes::ask(*state);
      for (int i = 0; i < lambda; ++i) params[i] = params_from_search(asked[i].params);
      glog.mean = to_std(state->mean);
      glog.sigma = state->sigma;
    } else {
      const ActionVector v = fixed.to_vector();
      glog.mean.assign(v.begin(), v.end());
      glog.sigma = 0.0;
    }

    std::vector<Scored> scored(static_cast<std::size_t>(lambda));
    parallel_for(lambda, cfg.workers, [&](int i) {
      const std::uint64_t seed = derive_seed({cfg.cmaes.seed, cfg.pipeline.sim.seed,
                                              static_cast<std::uint64_t>(g),
                                              static_cast<std::uint64_t>(i)});
      scored[i] = score_candidate(params[i], cfg.object, cfg.pipeline, cfg.trials_per_eval, seed);
    });

    if (state) {
      for (int i = 0; i < lambda; ++i) asked[i].fitness = scored[i].reward.r;
      state = cmaes::tell(*state, asked);
    }

    double sum_r = 0.0;
    glog.best_r = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < lambda; ++i) {
      CandidateLog c;
      c.generation = g;
      c.index = i;
      c.params = params[i];
      if (state) c.raw = to_std(asked[i].raw);
      c.reward = scored[i].reward;
      c.success = scored[i].success;

      sum_r += c.reward.r;
      glog.best_r = std::max(glog.best_r, c.reward.r);
      glog.successes += c.success ? 1 : 0;
      if (!have_best || c.reward.r > report.best_fitness) {
        have_best = true;
        report.best_fitness = c.reward.r;
        report.best_params = c.params;
        report.best_generation = g;
        report.best_index = i;
      }

      ojson rec;
      rec["generation"] = g;
      rec["index"] = i;
      rec["params"] = params_json(c.params);
      rec["raw"] = c.raw;
      rec["r_rot"] = c.reward.r_rot;
      rec["p_fall"] = c.reward.p_fall;
      rec["r"] = c.reward.r;
      rec["success"] = c.success;
      candidates_out << rec.dump() << '\n';
      glog.candidates.push_back(std::move(c));
    }
    glog.mean_r = sum_r / lambda;
    glog.best_so_far_r = report.best_fitness;
    best_trace.push_back(report.best_fitness);
    report.evaluations += lambda;
    report.success_candidates += glog.successes;
    if (glog.successes > 0 && !report.first_success_generation) report.first_success_generation = g;
    glog.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    ojson grec;
    grec["generation"] = g;
    grec["mean"] = glog.mean;
    grec["sigma"] = glog.sigma;
    grec["best_r"] = glog.best_r;
    grec["mean_r"] = glog.mean_r;
    grec["best_so_far_r"] = glog.best_so_far_r;
    grec["successes"] = glog.successes;
    grec["lambda"] = cfg.pipeline.reward.lambda;
    grec["wall_clock_s"] = glog.wall_clock_s;
    generations_out << grec.dump() << '\n';
    report.generation_logs.push_back(std::move(glog));
  }

  write_params_file(cfg.out_dir / "best_params.json",
                    StoredParams{report.best_params, cfg.object.name, std::string(to_string(cfg.mode)),
                                 report.best_fitness});

  ojson summary;
  summary["object"] = cfg.object.name;
  summary["mode"] = std::string(to_string(cfg.mode));
  summary["population_size"] = lambda;
  summary["generations"] = cfg.cmaes.generations;
  summary["evaluations"] = report.evaluations;
  summary["best_fitness"] = report.best_fitness;
  summary["best_params"] = params_json(report.best_params);
  summary["best_generation"] = report.best_generation;
  summary["best_index"] = report.best_index;
  summary["best_so_far"] = best_trace;
  summary["success_candidates"] = report.success_candidates;
  summary["first_success_generation"] =
      report.first_success_generation ? ojson(*report.first_success_generation) : ojson(nullptr);
  summary["lambda"] = cfg.pipeline.reward.lambda;
  // Where and how wide the run executed does not change its results.
  ojson echoed = ojson::parse(dump_campaign_config(cfg));
  echoed.erase("out_dir");
  echoed.erase("workers");
  summary["config"] = std::move(echoed);
  open_out(cfg.out_dir / "summary.json") << summary.dump(2) << '\n';

  if (!candidates_out || !generations_out) throw IoError("failed writing campaign logs");
  return report;
}

void write_params_file(const std::filesystem::path& path, const StoredParams& stored) {
  ojson j;
  j["object"] = stored.object;
  j["mode"] = stored.mode;
  j["fitness"] = stored.fitness;
  j["params"] = params_json(stored.params);
  open_out(path) << j.dump(2) << '\n';
}

StoredParams read_params_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open params file " + path.string());
  ojson j;
  try {
    j = ojson::parse(is);
  } catch (const ojson::parse_error& e) {
    throw ParseError(1, std::string("params file: ") + e.what());
  }
  StoredParams s;
  try {
    const auto values = j.at("params").get<std::vector<double>>();
    s.params = ActionParams::from_vector(values);
    s.object = j.value("object", std::string{});
    s.mode = j.value("mode", std::string{});
    s.fitness = j.value("fitness", 0.0);
  } catch (const ojson::exception& e) {
    throw ParseError(1, std::string("params file: ") + e.what());
  } catch (const ContractError& e) {
    throw ParseError(1, std::string("params file: ") + e.what());
  }
  return s;
}

EvaluationReport evaluate_params(const ActionParams& params, const ObjectModel& obj, int trials,
                                 const PipelineConfig& pipeline) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  pipeline.validate();
  EvaluationReport rep;
  rep.trials = trials;
  for (int k = 0; k < trials; ++k) {
    SimConfig sim = pipeline.sim;
    sim.seed = derive_seed({pipeline.sim.seed, 0xE7A1ULL, static_cast<std::uint64_t>(k)});
    const ActionEvaluation ev =
        evaluate_action(params, obj, pipeline.scaling, sim, pipeline.filter, pipeline.reward);
    rep.successes += ev.success ? 1 : 0;
    rep.mean_reward.r_rot += ev.reward.r_rot / trials;
    rep.mean_reward.p_fall += ev.reward.p_fall / trials;
    rep.per_trial.push_back(ev);
  }
  rep.mean_reward.r = rep.mean_reward.r_rot - pipeline.reward.lambda * rep.mean_reward.p_fall;
  return rep;
}

EvaluationReport evaluate_params(const std::filesystem::path& params_file, const ObjectModel& obj,
                                 int trials, const PipelineConfig& pipeline) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  return evaluate_params(read_params_file(params_file).params, obj, trials, pipeline);
}

ReplayResult replay(const TrajectoryFile& traj, const FilterConfig& filter, const RewardConfig& reward) {
  if (traj.frames.empty()) throw ContractError("replay: trajectory has no frames");
  const ObservedTrajectory observed = observe_trajectory(traj.frames, filter);
  ReplayResult out;
  out.reward = objective(observed.observations, reward);
  out.success = label_success(observed.observations, reward);
  out.frames = traj.frames.size();
  out.degenerate_frames = observed.degenerate_frames;
  return out;
}

ReplayResult replay(const std::filesystem::path& trajectory_file, const FilterConfig& filter,
                    const RewardConfig& reward) {
  return replay(read_trajectory(trajectory_file), filter, reward);
}

EpisodeResult export_episode(const ActionParams& params, const ObjectModel& obj,
                             const PipelineConfig& pipeline,
                             const std::filesystem::path& trajectory_file) {
  EpisodeResult episode = simulate(denormalize(params, pipeline.scaling), obj, pipeline.sim);
  write_trajectory(trajectory_file, TrajectoryFile{pipeline.sim.fps, episode.trajectory});
  write_sidecar(sidecar_path(trajectory_file),
                GroundTruthSidecar{episode.ground_truth_theta, episode.dropped_at, episode.caught});
  return episode;
}

const AblationCell& AblationReport::cell(CampaignMode mode, const std::string& object) const {
  for (const AblationCell& c : cells) {
    if (c.mode == mode && c.object == object) return c;
  }
  throw ContractError("no ablation cell for " + std::string(to_string(mode)) + "/" + object);
}

std::string AblationReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "mode";
  for (const std::string& o : objects) os << std::setw(14) << o;
  os << '\n';
  for (CampaignMode m : modes) {
    os << std::setw(12) << to_string(m);
    for (const std::string& o : objects) {
      const AblationCell& c = cell(m, o);
      os << std::setw(14) << (std::to_string(c.successes) + "/" + std::to_string(c.trials));
    }
    os << '\n';
  }
  return os.str();
}

AblationReport ablation_suite(const std::vector<std::string>& objects,
                              const std::filesystem::path& out_dir, const CampaignConfig& base,
                              int trials) {
  if (objects.empty()) throw ConfigError("ablation needs at least one object");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  ensure_dir(out_dir);

  AblationReport report;
  report.modes = {CampaignMode::kInitOnly, CampaignMode::kNoGrasp, CampaignMode::kTransfer,
                  CampaignMode::kFull};
  report.objects = objects;

  auto run_mode = [&](const std::string& object, CampaignMode mode) {
    CampaignConfig cfg = base;
    cfg.object = object_preset(object);
    cfg.mode = mode;
    cfg.out_dir = out_dir / object / std::string(to_string(mode));
    if (mode == CampaignMode::kTransfer) cfg.transfer_source = out_dir / "pen1" / "full" / "best_params.json";
    return run_campaign(cfg);
  };

  // The transfer row needs pen1's full-mode optimum first.
  const CampaignReport pen1_full = run_mode("pen1", CampaignMode::kFull);

  for (CampaignMode mode : report.modes) {
    for (const std::string& object : objects) {
      const ObjectModel obj = object_preset(object);
      ActionParams params;
      if (mode == CampaignMode::kFull && object == "pen1") {
        params = pen1_full.best_params;
      } else {
        const CampaignReport r = run_mode(object, mode);
        params = mode == CampaignMode::kTransfer ? pen1_full.best_params
                 : mode == CampaignMode::kInitOnly ? initial_action()
                                                   : r.best_params;
      }
      const EvaluationReport ev = evaluate_params(params, obj, trials, base.pipeline);
      report.cells.push_back(AblationCell{mode, object, ev.successes, ev.trials});
    }
  }

  ojson j;
  j["trials"] = trials;
  j["objects"] = objects;
  j["cells"] = ojson::array();
  for (const AblationCell& c : report.cells) {
    j["cells"].push_back({{"mode", std::string(to_string(c.mode))},
                          {"object", c.object},
                          {"successes", c.successes},
                          {"trials", c.trials}});
  }
  open_out(out_dir / "ablation.json") << j.dump(2) << '\n';
  open_out(out_dir / "ablation.txt") << report.table();
  return report;
}

}  // namespace spinopt
