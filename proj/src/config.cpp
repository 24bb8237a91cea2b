#include "spinopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

using nlohmann::json;

// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    T value{};
    read(key, value);
    out = value;
  }

  void mark(const char* key) { seen_.insert(key); }

  void read_point(const char* key, Eigen::Vector3d& out) {
    std::optional<std::array<double, 3>> arr;
    read(key, arr);
    if (arr) out = Eigen::Vector3d((*arr)[0], (*arr)[1], (*arr)[2]);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + name_ + "." + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void read_scaling(const json& j, ScalingConfig& c) {
  Section s(j, "scaling");
  s.read("servo_scales_deg", c.servo_scales_deg);
  s.read("delay_gain", c.delay_gain);
  s.read("delay_bias", c.delay_bias);
  s.read("grasp_max_m", c.grasp_max_m);
  s.finish();
}

void read_sim(const json& j, SimConfig& c) {
  Section s(j, "sim");
  s.read("fps", c.fps);
  s.read("episode_duration", c.episode_duration);
  s.read("impulse_gain", c.impulse_gain);
  s.read("drive_weights", c.drive_weights);
  s.read("drag_rate", c.drag_rate);
  s.read("stall_speed", c.stall_speed);
  s.read("catch_window", c.catch_window);
  s.read("grasp_slip_limit", c.grasp_slip_limit);
  s.read("surface_points", c.surface_points);
  s.read("noise_sigma", c.noise_sigma);
  s.read("seed", c.seed);
  s.read_point("pivot", c.pivot);
  s.read_point("drop_offset", c.drop_offset);
  s.finish();
}

void read_filter(const json& j, FilterConfig& c) {
  Section s(j, "filter");
  s.read_point("bbox_min", c.bbox_min);
  s.read_point("bbox_max", c.bbox_max);
  s.read("presence_threshold", c.presence_threshold);
  s.finish();
}

void read_reward(const json& j, RewardConfig& c) {
  Section s(j, "reward");
  s.read("lambda", c.lambda);
  s.read("rotation_tolerance", c.rotation_tolerance);
  s.read("tail_frames", c.tail_frames);
  s.finish();
}

void read_pipeline_sections(const json& j, PipelineConfig& p) {
  if (auto it = j.find("scaling"); it != j.end()) read_scaling(*it, p.scaling);
  if (auto it = j.find("sim"); it != j.end()) read_sim(*it, p.sim);
  if (auto it = j.find("filter"); it != j.end()) read_filter(*it, p.filter);
  if (auto it = j.find("reward"); it != j.end()) read_reward(*it, p.reward);
}

ObjectModel read_object(const json& j) {
  if (j.is_string()) return object_preset(j.get<std::string>());
  ObjectModel obj;
  obj.name = "custom";
  Section s(j, "object");
  s.read("name", obj.name);
  s.read("length", obj.length);
  s.read("radius", obj.radius);
  s.read("mass", obj.mass);
  s.read("com_offset", obj.com_offset);
  s.finish();
  return obj;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

json point_json(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

}  // namespace

std::string_view to_string(CampaignMode mode) {
  switch (mode) {
    case CampaignMode::kInitOnly: return "init-only";
    case CampaignMode::kNoGrasp: return "no-grasp";
    case CampaignMode::kTransfer: return "transfer";
    case CampaignMode::kFull: return "full";
  }
  return "unknown";
}

CampaignMode parse_mode(std::string_view text) {
  if (text == "init-only") return CampaignMode::kInitOnly;
  if (text == "no-grasp") return CampaignMode::kNoGrasp;
  if (text == "transfer") return CampaignMode::kTransfer;
  if (text == "full") return CampaignMode::kFull;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected init-only, no-grasp, transfer or full)");
}

void PipelineConfig::validate() const {
  scaling.validate();
  sim.validate();
  filter.validate();
  reward.validate();
}

void CampaignConfig::validate() const {
  object.validate();
  pipeline.validate();
  if (!(cmaes.sigma0 > 0.0)) throw ConfigError("cmaes.sigma0 must be positive");
  if (cmaes.population_size && *cmaes.population_size < 2) {
    throw ConfigError("cmaes.population_size must be >= 2");
  }
  if (cmaes.generations < 1) throw ConfigError("cmaes.generations must be >= 1");
  if (trials_per_eval < 1) throw ConfigError("trials_per_eval must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (mode == CampaignMode::kTransfer && !transfer_source) {
    throw ConfigError("transfer mode needs 'transfer_source'");
  }
}

CampaignConfig parse_campaign_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  CampaignConfig cfg;
  Section top(j, "config");

  if (auto it = j.find("object"); it != j.end()) cfg.object = read_object(*it);
  top.mark("object");

  std::string mode = std::string(to_string(cfg.mode));
  top.read("mode", mode);
  cfg.mode = parse_mode(mode);

  if (auto it = j.find("cmaes"); it != j.end()) {
    Section s(*it, "cmaes");
    s.read("sigma0", cfg.cmaes.sigma0);
    s.read("population_size", cfg.cmaes.population_size);
    s.read("generations", cfg.cmaes.generations);
    s.read("seed", cfg.cmaes.seed);
    s.finish();
  }
  read_pipeline_sections(j, cfg.pipeline);
  for (const char* key : {"cmaes", "scaling", "sim", "filter", "reward"}) top.mark(key);

  top.read("trials_per_eval", cfg.trials_per_eval);
  top.read("workers", cfg.workers);
  std::string out_dir = cfg.out_dir.string();
  top.read("out_dir", out_dir);
  cfg.out_dir = out_dir;
  std::optional<std::string> transfer;
  top.read("transfer_source", transfer);
  if (transfer) cfg.transfer_source = *transfer;
  top.finish();

  cfg.validate();
  return cfg;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_campaign_config(ss.str());
}

PipelineConfig parse_pipeline_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig p;
  read_pipeline_sections(j, p);
  p.validate();
  return p;
}

std::string dump_campaign_config(const CampaignConfig& cfg) {
  const PipelineConfig& p = cfg.pipeline;
  json j;
  j["object"] = {{"name", cfg.object.name},
                 {"length", cfg.object.length},
                 {"radius", cfg.object.radius},
                 {"mass", cfg.object.mass},
                 {"com_offset", cfg.object.com_offset}};
  j["mode"] = std::string(to_string(cfg.mode));
  j["cmaes"] = {{"sigma0", cfg.cmaes.sigma0},
                {"population_size", cfg.cmaes.population_size ? json(*cfg.cmaes.population_size)
                                                              : json(nullptr)},
                {"generations", cfg.cmaes.generations},
                {"seed", cfg.cmaes.seed}};
  j["scaling"] = {{"servo_scales_deg", p.scaling.servo_scales_deg},
                  {"delay_gain", p.scaling.delay_gain},
                  {"delay_bias", p.scaling.delay_bias},
                  {"grasp_max_m", p.scaling.grasp_max_m}};
  j["sim"] = {{"fps", p.sim.fps},
              {"episode_duration", p.sim.episode_duration},
              {"impulse_gain", p.sim.impulse_gain},
              {"drive_weights", p.sim.drive_weights},
              {"drag_rate", p.sim.drag_rate},
              {"stall_speed", p.sim.stall_speed},
              {"catch_window", p.sim.catch_window},
              {"grasp_slip_limit", p.sim.grasp_slip_limit},
              {"surface_points", p.sim.surface_points},
              {"noise_sigma", p.sim.noise_sigma},
              {"seed", p.sim.seed},
              {"pivot", point_json(p.sim.pivot)},
              {"drop_offset", point_json(p.sim.drop_offset)}};
  j["filter"] = {{"bbox_min", point_json(p.filter.bbox_min)},
                 {"bbox_max", point_json(p.filter.bbox_max)},
                 {"presence_threshold", p.filter.presence_threshold}};
  j["reward"] = {{"lambda", p.reward.lambda},
                 {"rotation_tolerance", p.reward.rotation_tolerance},
                 {"tail_frames", p.reward.tail_frames}};
  j["trials_per_eval"] = cfg.trials_per_eval;
  j["workers"] = cfg.workers;
  j["out_dir"] = cfg.out_dir.string();
  j["transfer_source"] = cfg.transfer_source ? json(cfg.transfer_source->string()) : json(nullptr);
  return j.dump(2);
}

}  // namespace spinopt
