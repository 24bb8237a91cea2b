#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spinopt::cmaes {

/// round(4 + 3 log2 n); 13 for the full 8-D action.
int default_population_size(int n);

/// Learning rates and weights derived once from (n, lambda).
struct StrategyParameters {
  int dimension = 0;
  int population_size = 0;
  int parent_count = 0;  // mu
  Eigen::VectorXd weights;  // mu positive log-rank weights summing to 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;  // E||N(0, I)||
};

/// A single sample. `params` is `raw` clamped into [-1, 1]^n.
struct Candidate {
  int index = 0;
  Eigen::VectorXd raw;
  Eigen::VectorXd params;
  std::optional<double> fitness;
};

struct BestRecord {
  Eigen::VectorXd params;
  double fitness = 0.0;
  int generation = 0;
  int index = 0;
};

/// Full optimizer state; a value threaded through ask/tell.
struct OptimizerState {
  StrategyParameters strategy;
  Eigen::VectorXd mean;
  double sigma = 0.0;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd path_sigma;
  Eigen::VectorXd path_c;
  int generation = 0;
  std::uint64_t rng_seed = 0;
  std::optional<BestRecord> best;
  /// Best fitness after each tell, indexed by generation.
  std::vector<double> best_history;
};

OptimizerState init(const Eigen::VectorXd& mean0, double sigma0, int population_size,
                    std::uint64_t seed);

/// Samples lambda candidates from N(mean, sigma^2 C). Pure: the sampler is
/// reseeded from (rng_seed, generation), so repeated asks agree.
std::vector<Candidate> ask(const OptimizerState& state);

/// Ranks by fitness (descending, stable, non-finite last) and applies the
/// rank-one, rank-mu and cumulative step-size updates. Maximizes fitness.
OptimizerState tell(const OptimizerState& state, std::span<const Candidate> evaluated);

struct BestSoFar {
  Eigen::VectorXd params;
  double fitness = 0.0;
};

/// Highest-fitness evaluated candidate over all generations; earliest on ties.
BestSoFar best_so_far(const OptimizerState& state);

/// Eigendecomposition C = B diag(D^2) B^T with a single diagonal repair attempt.
struct Factorization {
  Eigen::MatrixXd basis;      // B
  Eigen::VectorXd axis_std;   // D
  Eigen::MatrixXd covariance; // C after any repair
  bool repaired = false;
};
Factorization factorize(const Eigen::MatrixXd& covariance);

}  // namespace spinopt::cmaes
