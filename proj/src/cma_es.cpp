#include "spinopt/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "spinopt/errors.hpp"

namespace spinopt::cmaes {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

StrategyParameters make_strategy(int n, int lambda) {
  StrategyParameters s;
  s.dimension = n;
  s.population_size = lambda;
  s.parent_count = lambda / 2;
  const int mu = s.parent_count;

  s.weights.resize(mu);
  for (int i = 0; i < mu; ++i) {
    s.weights[i] = std::log((lambda + 1.0) / 2.0) - std::log(i + 1.0);
  }
  s.weights /= s.weights.sum();
  s.mu_eff = 1.0 / s.weights.squaredNorm();

  const double nd = n;
  s.c_sigma = (s.mu_eff + 2.0) / (nd + s.mu_eff + 5.0);
  s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (nd + 1.0)) - 1.0) + s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / nd) / (nd + 4.0 + 2.0 * s.mu_eff / nd);
  s.c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c_1,
                    2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) / ((nd + 2.0) * (nd + 2.0) + s.mu_eff));
  s.chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  return s;
}

bool try_eigen(const Eigen::MatrixXd& c, Factorization& out) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) return false;
  const Eigen::VectorXd& ev = solver.eigenvalues();
  if (!ev.allFinite() || ev.minCoeff() <= 0.0) return false;
  out.basis = solver.eigenvectors();
  out.axis_std = ev.cwiseSqrt();
  out.covariance = c;
  return true;
}

// Non-finite fitness ranks last; stable order keeps ties in index order.
bool ranks_before(double a, double b) {
  const bool fa = std::isfinite(a);
  const bool fb = std::isfinite(b);
  if (fa != fb) return fa;
  if (!fa) return false;
  return a > b;
}

}  // namespace

int default_population_size(int n) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  return static_cast<int>(std::lround(4.0 + 3.0 * std::log2(static_cast<double>(n))));
}

Factorization factorize(const Eigen::MatrixXd& covariance) {
  Factorization f;
  if (covariance.allFinite() && try_eigen(covariance, f)) return f;

  const double n = static_cast<double>(covariance.rows());
  const double trace = covariance.trace();
  if (std::isfinite(trace) && trace > 0.0) {
    Eigen::MatrixXd repaired = covariance;
    repaired.diagonal().array() += 1e-10 * trace / n;
    if (try_eigen(repaired, f)) {
      f.repaired = true;
      return f;
    }
  }
  throw NumericalError("covariance matrix is not positive definite after repair");
}

OptimizerState init(const Eigen::VectorXd& mean0, double sigma0, int population_size,
                    std::uint64_t seed) {
  const int n = static_cast<int>(mean0.size());
  if (n < 1) throw ConfigError("cmaes: mean must have at least one component");
  if (!mean0.allFinite()) throw ConfigError("cmaes: mean must be finite");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("cmaes.sigma0 must be positive");
  if (population_size < 2) throw ConfigError("cmaes.population_size must be >= 2");

  OptimizerState s;
  s.strategy = make_strategy(n, population_size);
  s.mean = mean0;
  s.sigma = sigma0;
  s.covariance = Eigen::MatrixXd::Identity(n, n);
  s.path_sigma = Eigen::VectorXd::Zero(n);
  s.path_c = Eigen::VectorXd::Zero(n);
  s.generation = 0;
  s.rng_seed = seed;
  return s;
}

std::vector<Candidate> ask(const OptimizerState& state) {
  const int n = state.strategy.dimension;
  const int lambda = state.strategy.population_size;
  const Factorization f = factorize(state.covariance);
  const Eigen::MatrixXd transform = f.basis * f.axis_std.asDiagonal();

  std::mt19937_64 rng(splitmix64(state.rng_seed ^ splitmix64(static_cast<std::uint64_t>(state.generation))));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Candidate> out;
  out.reserve(lambda);
  Eigen::VectorXd z(n);
  for (int k = 0; k < lambda; ++k) {
    for (int i = 0; i < n; ++i) z[i] = normal(rng);
    Candidate c;
    c.index = k;
    c.raw = state.mean + state.sigma * (transform * z);
    c.params = c.raw.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0); });
    out.push_back(std::move(c));
  }
  return out;
}

OptimizerState tell(const OptimizerState& state, std::span<const Candidate> evaluated) {
  const StrategyParameters& sp = state.strategy;
  const int n = sp.dimension;
  const int lambda = sp.population_size;
  if (static_cast<int>(evaluated.size()) != lambda) {
    throw ContractError("tell expects " + std::to_string(lambda) + " candidates, got " +
                        std::to_string(evaluated.size()));
  }
  for (const Candidate& c : evaluated) {
    if (!c.fitness) throw ContractError("candidate " + std::to_string(c.index) + " has no fitness");
    if (c.raw.size() != n || c.params.size() != n) {
      throw ContractError("candidate " + std::to_string(c.index) + " has wrong dimension");
    }
  }

  std::vector<int> order(lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ranks_before(*evaluated[a].fitness, *evaluated[b].fitness);
  });

  const Factorization f = factorize(state.covariance);
  const Eigen::MatrixXd inv_sqrt_c =
      f.basis * f.axis_std.cwiseInverse().asDiagonal() * f.basis.transpose();

  OptimizerState next = state;
  next.covariance = f.covariance;

  Eigen::MatrixXd steps(n, sp.parent_count);
  for (int i = 0; i < sp.parent_count; ++i) {
    steps.col(i) = (evaluated[order[i]].raw - state.mean) / state.sigma;
  }
  const Eigen::VectorXd y_w = steps * sp.weights;
  next.mean = state.mean + state.sigma * y_w;

  next.path_sigma = (1.0 - sp.c_sigma) * state.path_sigma +
                    std::sqrt(sp.c_sigma * (2.0 - sp.c_sigma) * sp.mu_eff) * (inv_sqrt_c * y_w);
  const double ps_norm = next.path_sigma.norm();
  const double decay = 1.0 - std::pow(1.0 - sp.c_sigma, 2.0 * (state.generation + 1));
  const bool h_sigma = ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * sp.chi_n;

  next.path_c = (1.0 - sp.c_c) * state.path_c;
  if (h_sigma) next.path_c += std::sqrt(sp.c_c * (2.0 - sp.c_c) * sp.mu_eff) * y_w;

  const double stall_correction = h_sigma ? 0.0 : sp.c_c * (2.0 - sp.c_c);
  Eigen::MatrixXd rank_mu = steps * sp.weights.asDiagonal() * steps.transpose();
  next.covariance = (1.0 - sp.c_1 - sp.c_mu) * f.covariance +
                    sp.c_1 * (next.path_c * next.path_c.transpose() + stall_correction * f.covariance) +
                    sp.c_mu * rank_mu;
  next.covariance = 0.5 * (next.covariance + next.covariance.transpose()).eval();

  next.sigma = state.sigma * std::exp((sp.c_sigma / sp.d_sigma) * (ps_norm / sp.chi_n - 1.0));
  if (!(next.sigma > 0.0) || !std::isfinite(next.sigma) || !next.mean.allFinite()) {
    throw NumericalError("step size or mean became non-finite");
  }

  for (const Candidate& c : evaluated) {
    const double fit = *c.fitness;
    if (!std::isfinite(fit)) continue;
    if (!next.best || fit > next.best->fitness) {
      next.best = BestRecord{c.params, fit, state.generation, c.index};
    }
  }
  next.best_history.push_back(next.best ? next.best->fitness
                                        : -std::numeric_limits<double>::infinity());
  next.generation = state.generation + 1;
  return next;
}

BestSoFar best_so_far(const OptimizerState& state) {
  if (!state.best) throw ContractError("best_so_far: no evaluated candidate yet");
  return BestSoFar{state.best->params, state.best->fitness};
}

}  // namespace spinopt::cmaes
