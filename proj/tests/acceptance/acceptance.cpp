// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "spinopt/action_space.hpp"
#include "spinopt/campaign.hpp"
#include "spinopt/cma_es.hpp"
#include "spinopt/reward.hpp"
#include "spinopt/simulator.hpp"
#include "test_support.hpp"

using namespace spinopt;
using spinopt::testing::ScratchDir;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string strip_wall_clock(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::string out;
  for (std::string line; std::getline(is, line);) {
    auto j = nlohmann::ordered_json::parse(line);
    j.erase("wall_clock_s");
    out += j.dump() + "\n";
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Default full campaign: 130 evaluations in under 60 s.
Outcome budget_fidelity() {
  ScratchDir dir("acc_budget");
  CampaignConfig cfg;
  cfg.out_dir = dir.path();
  const auto start = std::chrono::steady_clock::now();
  const CampaignReport r = run_campaign(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t logged = 0;
  {
    std::ifstream is(dir.path() / "candidates.jsonl");
    for (std::string line; std::getline(is, line);) ++logged;
  }
  Outcome o;
  o.pass = r.evaluations == 130 && logged == 130 && r.population_size == 13 && r.generations == 10 &&
           secs < 60.0;
  o.detail = (Detail() << "evaluations=" << r.evaluations << " logged=" << logged << " lambda="
                       << r.population_size << " runtime=" << secs << "s")
                 .str();
  return o;
}

// 2. Ablation ordering on pen1/pen2/pen3, repeated for three seeds.
Outcome table_structure() {
  const std::vector<std::string> pens{"pen1", "pen2", "pen3"};
  Outcome o;
  Detail d;
  for (std::uint64_t seed : {7ull, 11ull, 23ull}) {
    ScratchDir dir("acc_ablation_" + std::to_string(seed));
    CampaignConfig base;
    base.cmaes.seed = seed;
    base.pipeline.sim.seed = seed;
    const AblationReport rep = ablation_suite(pens, dir.path(), base, 10);

    bool init_zero = true;
    bool full_high = true;
    bool full_ge_nograsp = true;
    bool strict = false;
    for (const std::string& p : pens) {
      const int init = rep.cell(CampaignMode::kInitOnly, p).successes;
      const int full = rep.cell(CampaignMode::kFull, p).successes;
      const int nog = rep.cell(CampaignMode::kNoGrasp, p).successes;
      init_zero &= init == 0;
      full_high &= full >= 9;
      if (object_preset(p).com_offset != 0.0) {
        full_ge_nograsp &= full >= nog;
        strict |= full > nog;
      }
    }
    const bool ok = init_zero && full_high && full_ge_nograsp && strict;
    o.pass &= ok;
    d << "seed " << seed << ": init/nograsp/full =";
    for (const std::string& p : pens) {
      d << " " << p << " " << rep.cell(CampaignMode::kInitOnly, p).successes << "/"
        << rep.cell(CampaignMode::kNoGrasp, p).successes << "/" << rep.cell(CampaignMode::kFull, p).successes;
    }
    d << (ok ? " ok; " : " FAILED; ");
  }
  o.detail = d.str();
  return o;
}

// 3. Breakdown vs literal summation over 1000 random sequences.
Outcome reward_oracle() {
  std::mt19937_64 rng(20240);
  std::uniform_int_distribution<std::size_t> len(1, 20);
  std::uniform_real_distribution<double> lam(0.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto obs = spinopt::testing::random_observations(rng, len(rng));
    RewardConfig cfg;
    cfg.lambda = lam(rng);
    const RewardBreakdown b = objective(obs, cfg);
    const auto lit = spinopt::testing::literal_reward(obs, cfg.lambda);
    worst = std::max({worst, std::abs(b.r_rot - lit.r_rot), std::abs(b.p_fall - lit.p_fall),
                      std::abs(b.r - lit.r)});
  }
  return {worst <= 1e-12, (Detail() << "max abs deviation=" << worst << " over 1000 sequences").str()};
}

// 4. Perception against simulator ground truth, noiseless and noisy.
Outcome perception_accuracy() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> servo(0.0, 1.0);
  std::uniform_real_distribution<double> delay(-1.0, 1.0);
  std::uniform_real_distribution<double> grasp(-0.3, 0.3);
  const std::vector<std::string> objects = object_preset_names();
  double worst_clean = 0.0;
  double worst_noisy = 0.0;
  double worst_rrot = 0.0;
  int frames_checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ActionParams a;
    for (double& s : a.servo) s = servo(rng);
    a.delay = delay(rng);
    a.grasp = grasp(rng);
    const ObjectModel obj = object_preset(objects[trial % objects.size()]);
    const PhysicalAction phys = denormalize(a, ScalingConfig{});

    for (double noise : {0.0, 0.0005}) {
      SimConfig sim;
      sim.noise_sigma = noise;
      sim.seed = static_cast<std::uint64_t>(trial);
      const EpisodeResult ep = simulate(phys, obj, sim);
      const auto obs = observe_trajectory(ep.trajectory, FilterConfig{}).observations;
      double gt_net = 0.0;
      for (std::size_t k = 0; k < obs.size(); ++k) {
        if (!obs[k].present) continue;
        const double err = std::abs(spinopt::testing::angle_diff(*obs[k].theta_z, ep.ground_truth_theta[k]));
        (noise == 0.0 ? worst_clean : worst_noisy) = std::max(noise == 0.0 ? worst_clean : worst_noisy, err);
        ++frames_checked;
        if (k > 0 && obs[k - 1].present) gt_net += ep.ground_truth_theta[k] - ep.ground_truth_theta[k - 1];
      }
      if (noise > 0.0) worst_rrot = std::max(worst_rrot, std::abs(rotation_reward(obs) - gt_net / kTwoPi));
    }
  }
  const double half_degree = 0.5 * std::numbers::pi / 180.0;
  Outcome o;
  o.pass = worst_clean <= 1e-6 && worst_noisy <= half_degree && worst_rrot <= 0.02 && frames_checked > 0;
  o.detail = (Detail() << "noiseless max err=" << worst_clean << " rad; noisy max err="
                       << worst_noisy * 180.0 / std::numbers::pi << " deg; noisy r_rot max err=" << worst_rrot
                       << " rev; frames=" << frames_checked)
                 .str();
  return o;
}

// 5. Sphere convergence within 30 generations and SPD covariance throughout.
Outcome optimizer_soundness() {
  std::vector<double> norms;
  bool spd = true;
  double worst_asym = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cmaes::OptimizerState s =
        cmaes::init(Eigen::VectorXd::Constant(8, 0.5), 0.3, cmaes::default_population_size(8), seed);
    for (int g = 0; g < 30; ++g) {
      auto cs = cmaes::ask(s);
      for (auto& c : cs) c.fitness = -c.params.squaredNorm();
      s = cmaes::tell(s, cs);
      const double asym = (s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff();
      worst_asym = std::max(worst_asym, asym);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.covariance);
      spd &= asym < 1e-10 && es.eigenvalues().minCoeff() > 0.0;
    }
    norms.push_back(cmaes::best_so_far(s).params.norm());
  }
  const double med = median(norms);
  return {med < 1e-3 && spd, (Detail() << "median best ||x|| after 30 generations=" << med
                                       << " (bound 1e-3); covariance SPD=" << (spd ? "yes" : "no")
                                       << " max asym=" << worst_asym)
                                 .str()};
}

// 6. Bit-level scaling of the initialization vector and the delay bounds.
Outcome scaling_exactness() {
  const ScalingConfig c;
  const PhysicalAction p = denormalize(initial_action(), c);
  const ServoVector expected{0.0, 0.0, 35.0, 70.0, 17.5, 45.0};
  ActionParams lo;
  lo.delay = -1.0;
  ActionParams hi;
  hi.delay = 1.0;
  const double dlo = denormalize(lo, c).delay_s;
  const double dhi = denormalize(hi, c).delay_s;
  const bool ok = p.servo_deltas_deg == expected && dlo == 0.5 && dhi == 0.9;
  return {ok, (Detail() << "servo=[" << p.servo_deltas_deg[0] << "," << p.servo_deltas_deg[1] << ","
                        << p.servo_deltas_deg[2] << "," << p.servo_deltas_deg[3] << "," << p.servo_deltas_deg[4]
                        << "," << p.servo_deltas_deg[5] << "] delay=[" << dlo << ", " << dhi << "]")
                  .str()};
}

// 7. Reproducible logs, replay equivalence, scaling round trip.
Outcome determinism_round_trips() {
  ScratchDir a("acc_det_a");
  ScratchDir b("acc_det_b");
  CampaignConfig cfg;
  cfg.out_dir = a.path();
  run_campaign(cfg);
  cfg.out_dir = b.path();
  cfg.workers = 4;
  run_campaign(cfg);
  const bool logs_equal =
      read_file(a.path() / "candidates.jsonl") == read_file(b.path() / "candidates.jsonl") &&
      strip_wall_clock(a.path() / "generations.jsonl") == strip_wall_clock(b.path() / "generations.jsonl") &&
      read_file(a.path() / "best_params.json") == read_file(b.path() / "best_params.json") &&
      read_file(a.path() / "summary.json") == read_file(b.path() / "summary.json");

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool replay_equal = true;
  const PipelineConfig pipeline;
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 8> v{};
    for (double& x : v) x = u(rng);
    v[7] *= 0.3;
    const ActionParams act = ActionParams::from_vector(v);
    const ObjectModel obj = object_preset(object_preset_names()[trial % 5]);
    const auto path = a.path() / ("episode" + std::to_string(trial) + ".jsonl");
    export_episode(act, obj, pipeline, path);
    const ReplayResult rep = replay(path, pipeline.filter, pipeline.reward);
    const ActionEvaluation ev =
        evaluate_action(act, obj, pipeline.scaling, pipeline.sim, pipeline.filter, pipeline.reward);
    replay_equal &= rep.reward.r_rot == ev.reward.r_rot && rep.reward.p_fall == ev.reward.p_fall &&
                    rep.reward.r == ev.reward.r && rep.success == ev.success;
  }

  double worst_round_trip = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 8> v{};
    for (double& x : v) x = u(rng);
    const ActionVector back =
        normalize(denormalize(ActionParams::from_vector(v), ScalingConfig{}), ScalingConfig{}).to_vector();
    for (std::size_t i = 0; i < kActionDim; ++i) worst_round_trip = std::max(worst_round_trip, std::abs(back[i] - v[i]));
  }
  const bool ok = logs_equal && replay_equal && worst_round_trip < 1e-12;
  return {ok, (Detail() << "logs identical=" << (logs_equal ? "yes" : "no")
                        << " replay identical=" << (replay_equal ? "yes" : "no")
                        << " round-trip max err=" << worst_round_trip)
                  .str()};
}

// 8. Brush and screwdriver reach a success within 10 generations.
Outcome non_pen_generalization() {
  Outcome o;
  Detail d;
  for (const char* name : {"brush", "screwdriver"}) {
    ScratchDir dir(std::string("acc_") + name);
    CampaignConfig cfg;
    cfg.object = object_preset(name);
    cfg.out_dir = dir.path();
    const CampaignReport r = run_campaign(cfg);
    o.pass &= r.first_success_generation.has_value() && r.generations == 10;
    d << name << ": first success generation=";
    if (r.first_success_generation) {
      d << *r.first_success_generation;
    } else {
      d << "none";
    }
    d << " successes=" << r.success_candidates << "; ";
  }
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 budget fidelity", budget_fidelity},
      {"2 ablation structure on pens", table_structure},
      {"3 reward oracle equivalence", reward_oracle},
      {"4 perception accuracy", perception_accuracy},
      {"5 optimizer soundness", optimizer_soundness},
      {"6 scaling exactness", scaling_exactness},
      {"7 determinism and round trips", determinism_round_trips},
      {"8 non-pen generalization", non_pen_generalization},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
