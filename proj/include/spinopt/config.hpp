#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "spinopt/action_space.hpp"
#include "spinopt/perception.hpp"
#include "spinopt/reward.hpp"
#include "spinopt/simulator.hpp"

namespace spinopt {

inline constexpr std::uint64_t kDefaultSeed = 7;

/// The four ablation rows.
enum class CampaignMode { kInitOnly, kNoGrasp, kTransfer, kFull };

std::string_view to_string(CampaignMode mode);
/// Accepts "init-only", "no-grasp", "transfer", "full".
CampaignMode parse_mode(std::string_view text);

struct CmaesConfig {
  double sigma0 = 0.3;
  /// Defaults to round(4 + 3 log2 n) for the mode's dimension.
  std::optional<int> population_size;
  int generations = 10;
  std::uint64_t seed = kDefaultSeed;
};

/// Everything needed to turn a normalized action into a scored episode.
struct PipelineConfig {
  ScalingConfig scaling;
  SimConfig sim;
  FilterConfig filter;
  RewardConfig reward;

  void validate() const;
};

struct CampaignConfig {
  ObjectModel object = object_preset("pen1");
  CampaignMode mode = CampaignMode::kFull;
  CmaesConfig cmaes;
  PipelineConfig pipeline;
  int trials_per_eval = 1;
  int workers = 1;
  std::filesystem::path out_dir = "campaign_out";
  /// Stored best-params file evaluated in transfer mode.
  std::optional<std::filesystem::path> transfer_source;

  void validate() const;
};

/// Parses JSON config text. Unknown keys are rejected. Throws ConfigError.
CampaignConfig parse_campaign_config(std::string_view json_text);
CampaignConfig load_campaign_config(const std::filesystem::path& path);
std::string dump_campaign_config(const CampaignConfig& cfg);

/// Parses only the pipeline sections (scaling, sim, filter, reward) of a config;
/// other keys are ignored.
PipelineConfig parse_pipeline_config(std::string_view json_text);

}  // namespace spinopt
