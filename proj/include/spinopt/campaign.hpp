#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinopt/action_space.hpp"
#include "spinopt/config.hpp"
#include "spinopt/reward.hpp"
#include "spinopt/simulator.hpp"
#include "spinopt/trajectory_io.hpp"

namespace spinopt {

struct CandidateLog {
  int generation = 0;
  int index = 0;
  ActionParams params;
  /// Pre-clamp optimizer sample in the mode's search space (empty for fixed-action modes).
  std::vector<double> raw;
  /// Mean breakdown over trials_per_eval episodes.
  RewardBreakdown reward;
  /// True when every trial was labelled a success.
  bool success = false;
};

struct GenerationLog {
  int generation = 0;
  std::vector<CandidateLog> candidates;
  /// Optimizer mean/sigma before this generation's update (fixed modes log the action and 0).
  std::vector<double> mean;
  double sigma = 0.0;
  double best_r = 0.0;
  double mean_r = 0.0;
  double best_so_far_r = 0.0;
  int successes = 0;
  double wall_clock_s = 0.0;
};

struct CampaignReport {
  std::string object;
  CampaignMode mode = CampaignMode::kFull;
  int population_size = 0;
  int generations = 0;
  int evaluations = 0;
  ActionParams best_params;
  double best_fitness = 0.0;
  int best_generation = 0;
  int best_index = 0;
  std::optional<int> first_success_generation;
  int success_candidates = 0;
  std::vector<GenerationLog> generation_logs;
  std::filesystem::path out_dir;
};

/// Runs one campaign and writes into cfg.out_dir:
///   candidates.jsonl   one record per evaluated candidate (no wall-clock fields)
///   generations.jsonl  one record per generation (mean, sigma, aggregates, wall_clock_s)
///   best_params.json   best-so-far action
///   summary.json       budget, best fitness, best-so-far trace, first success generation
CampaignReport run_campaign(const CampaignConfig& cfg);

struct StoredParams {
  ActionParams params;
  std::string object;
  std::string mode;
  double fitness = 0.0;
};

void write_params_file(const std::filesystem::path& path, const StoredParams& stored);
/// Throws ParseError / IoError.
StoredParams read_params_file(const std::filesystem::path& path);

struct EvaluationReport {
  int successes = 0;
  int trials = 0;
  RewardBreakdown mean_reward;
  std::vector<ActionEvaluation> per_trial;
};

/// Runs `trials` episodes that differ only in the simulator seed.
EvaluationReport evaluate_params(const ActionParams& params, const ObjectModel& obj, int trials,
                                 const PipelineConfig& pipeline);
EvaluationReport evaluate_params(const std::filesystem::path& params_file, const ObjectModel& obj,
                                 int trials, const PipelineConfig& pipeline);

struct ReplayResult {
  RewardBreakdown reward;
  bool success = false;
  std::size_t frames = 0;
  std::size_t degenerate_frames = 0;
};

/// Perception + reward on an ingested trajectory. Throws ContractError on zero frames.
ReplayResult replay(const TrajectoryFile& traj, const FilterConfig& filter, const RewardConfig& reward);
ReplayResult replay(const std::filesystem::path& trajectory_file, const FilterConfig& filter,
                    const RewardConfig& reward);

/// Simulates one action and writes the trajectory file plus its ground-truth sidecar.
EpisodeResult export_episode(const ActionParams& params, const ObjectModel& obj,
                             const PipelineConfig& pipeline,
                             const std::filesystem::path& trajectory_file);

struct AblationCell {
  CampaignMode mode = CampaignMode::kFull;
  std::string object;
  int successes = 0;
  int trials = 0;
};

struct AblationReport {
  std::vector<CampaignMode> modes;
  std::vector<std::string> objects;
  std::vector<AblationCell> cells;  // mode-major

  const AblationCell& cell(CampaignMode mode, const std::string& object) const;
  std::string table() const;
};

/// All four modes per object, then `trials` repeatability episodes per cell.
/// The transfer row always uses pen1's full-mode best parameters.
AblationReport ablation_suite(const std::vector<std::string>& objects,
                              const std::filesystem::path& out_dir, const CampaignConfig& base,
                              int trials = 10);

}  // namespace spinopt
