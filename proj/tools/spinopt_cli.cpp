// spinopt: command line front end for campaigns, evaluation, replay and ablations.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinopt/campaign.hpp"
#include "spinopt/config.hpp"
#include "spinopt/errors.hpp"

namespace {

using nlohmann::ordered_json;
using namespace spinopt;

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

PipelineConfig pipeline_from(const std::string& config_path) {
  return config_path.empty() ? PipelineConfig{} : parse_pipeline_config(slurp(config_path));
}

ordered_json breakdown_json(const RewardBreakdown& r) {
  return {{"r_rot", r.r_rot}, {"p_fall", r.p_fall}, {"r", r.r}};
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised pen-spin primitive optimization"};
  app.require_subcommand(1);

  // campaign
  std::string campaign_config;
  std::optional<std::uint64_t> campaign_seed;
  std::string campaign_out;
  int campaign_workers = 0;
  auto* campaign = app.add_subcommand("campaign", "Run one optimization campaign");
  campaign->add_option("--config", campaign_config, "Campaign config file (JSON)")->required();
  campaign->add_option("--seed", campaign_seed, "Override cmaes.seed");
  campaign->add_option("--out", campaign_out, "Override out_dir");
  campaign->add_option("--workers", campaign_workers, "Parallel candidate evaluations");

  // evaluate
  std::string eval_params;
  std::string eval_object;
  int eval_trials = 10;
  std::string eval_config;
  auto* evaluate = app.add_subcommand("evaluate", "Repeatability check of stored parameters");
  evaluate->add_option("--params", eval_params, "best_params.json from a campaign")->required();
  evaluate->add_option("--object", eval_object, "Object preset")->required();
  evaluate->add_option("--trials", eval_trials, "Number of episodes")->required();
  evaluate->add_option("--config", eval_config, "Config file supplying scaling/sim/filter/reward");

  // replay
  std::string replay_traj;
  std::optional<double> replay_lambda;
  std::string replay_config;
  auto* replay_cmd = app.add_subcommand("replay", "Score a recorded trajectory file");
  replay_cmd->add_option("--trajectory", replay_traj, "Trajectory file (JSON lines)")->required();
  replay_cmd->add_option("--lambda", replay_lambda, "Fall penalty weight");
  replay_cmd->add_option("--config", replay_config, "Config file supplying filter/reward");

  // ablate
  std::string ablate_objects = "pen1,pen2,pen3";
  std::string ablate_out = "ablation_out";
  std::optional<std::uint64_t> ablate_seed;
  int ablate_trials = 10;
  std::string ablate_config;
  auto* ablate = app.add_subcommand("ablate", "Run all four modes per object and tabulate successes");
  ablate->add_option("--objects", ablate_objects, "Comma-separated presets");
  ablate->add_option("--out", ablate_out, "Output directory");
  ablate->add_option("--seed", ablate_seed, "Seed for optimizer and simulator");
  ablate->add_option("--trials", ablate_trials, "Repeatability episodes per cell");
  ablate->add_option("--config", ablate_config, "Base campaign config");

  // simulate
  std::string sim_params;
  std::string sim_object = "pen1";
  std::string sim_out;
  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate_cmd = app.add_subcommand("simulate", "Export one simulated episode as a trajectory file");
  simulate_cmd->add_option("--params", sim_params, "Params file (defaults to the initialization action)");
  simulate_cmd->add_option("--object", sim_object, "Object preset");
  simulate_cmd->add_option("--out", sim_out, "Trajectory file to write")->required();
  simulate_cmd->add_option("--config", sim_config, "Config file supplying scaling/sim");
  simulate_cmd->add_option("--seed", sim_seed, "Simulator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::kConfig);
  }

  try {
    if (*campaign) {
      CampaignConfig cfg = load_campaign_config(campaign_config);
      if (campaign_seed) cfg.cmaes.seed = *campaign_seed;
      if (!campaign_out.empty()) cfg.out_dir = campaign_out;
      if (campaign_workers > 0) cfg.workers = campaign_workers;
      const CampaignReport rep = run_campaign(cfg);
      ordered_json j;
      j["object"] = rep.object;
      j["mode"] = std::string(to_string(rep.mode));
      j["evaluations"] = rep.evaluations;
      j["best_fitness"] = rep.best_fitness;
      const ActionVector best = rep.best_params.to_vector();
      j["best_params"] = std::vector<double>(best.begin(), best.end());
      j["success_candidates"] = rep.success_candidates;
      j["first_success_generation"] = rep.first_success_generation
                                          ? ordered_json(*rep.first_success_generation)
                                          : ordered_json(nullptr);
      j["out_dir"] = rep.out_dir.string();
      std::cout << j.dump(2) << '\n';
    } else if (*evaluate) {
      const PipelineConfig pipeline = pipeline_from(eval_config);
      const EvaluationReport rep =
          evaluate_params(eval_params, object_preset(eval_object), eval_trials, pipeline);
      ordered_json j;
      j["object"] = eval_object;
      j["successes"] = rep.successes;
      j["trials"] = rep.trials;
      j["mean"] = breakdown_json(rep.mean_reward);
      std::cout << j.dump(2) << '\n';
    } else if (*replay_cmd) {
      PipelineConfig pipeline = pipeline_from(replay_config);
      if (replay_lambda) pipeline.reward.lambda = *replay_lambda;
      pipeline.reward.validate();
      const ReplayResult rep = replay(replay_traj, pipeline.filter, pipeline.reward);
      ordered_json j = breakdown_json(rep.reward);
      j["success"] = rep.success;
      std::cout << j.dump(2) << '\n';
    } else if (*ablate) {
      CampaignConfig base = ablate_config.empty() ? CampaignConfig{} : load_campaign_config(ablate_config);
      if (ablate_seed) {
        base.cmaes.seed = *ablate_seed;
        base.pipeline.sim.seed = *ablate_seed;
      }
      const AblationReport rep = ablation_suite(split_csv(ablate_objects), ablate_out, base, ablate_trials);
      std::cout << rep.table();
    } else if (*simulate_cmd) {
      PipelineConfig pipeline = pipeline_from(sim_config);
      if (sim_seed) pipeline.sim.seed = *sim_seed;
      const ActionParams params = sim_params.empty() ? initial_action() : read_params_file(sim_params).params;
      const EpisodeResult ep = export_episode(params, object_preset(sim_object), pipeline, sim_out);
      ordered_json j;
      j["frames"] = ep.trajectory.size();
      j["caught"] = ep.caught;
      j["dropped_at"] = ep.dropped_at ? ordered_json(*ep.dropped_at) : ordered_json(nullptr);
      j["drop_cause"] = std::string(to_string(ep.drop_cause));
      j["trajectory"] = sim_out;
      std::cout << j.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
