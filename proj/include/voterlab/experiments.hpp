#ifndef VOTERLAB_EXPERIMENTS_HPP
#define VOTERLAB_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voterlab/dynamics.hpp"
#include "voterlab/kernel.hpp"
#include "voterlab/piecewise.hpp"

namespace voterlab {

struct ExperimentConfig {
  Kernel kernel = constant_kernel(0.0);
  InitialCondition initial = PiecewiseLinear::constant(0.0);
  std::vector<std::size_t> ladder;
  double horizon = 20.0;  // T
  double dt = 0.1;        // grid spacing of every time grid
  double window = 1.0;    // D
  double eps = 1e-3;
  double c = 0.1;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  /// 0 selects a default: 4 x the largest ladder entry.
  std::size_t reference_n = 0;
  SolverOptions solver;
  unsigned threads = 1;
};

/// Ladder strictly increasing and non-empty; eps, c, window, horizon, dt
/// positive; trials >= 1.
void validate(const ExperimentConfig &cfg);

std::size_t resolved_reference_n(const ExperimentConfig &cfg);

struct ErrorRow {
  std::size_t n = 0;
  double sup_l2_error = 0.0;  // max over grid times of ||u_n(t) - u(t)||_2
  double diameter_at_T = 0.0;
  double exceptional_measure = 0.0;
};

struct ErrorTable {
  std::string reference;  // "closed_form" or "numeric n=<N>"
  std::vector<ErrorRow> rows;
};

/// Sup-in-time L2 error of each ladder entry against a reference: the exact
/// solution for the bipartite kernel with zero-mean-family data, otherwise a
/// numeric solve at reference_n. reference_n must be at least four times every
/// ladder entry that differs from it.
ErrorTable convergence_study(const ExperimentConfig &cfg, std::size_t reference_n);

struct ProximityRow {
  std::size_t n = 0;
  double max_exceptional_measure = 0.0;  // over grid times in [T, T+D]
  double max_diameter = 0.0;
  bool below_threshold = false;          // max_exceptional_measure < c^2
};

struct ProximityReport {
  std::string reference;
  bool consensus_reached = false;  // reference diameter reached eps/3 in horizon
  double consensus_time = 0.0;     // T(eps)
  double threshold = 0.0;          // c^2
  std::vector<ProximityRow> rows;  // empty when consensus was not reached
};

/// Key-theorem harness: T(eps) from the reference, then the worst exceptional
/// measure at eps over [T, T+D] for every ladder entry.
ProximityReport consensus_proximity(const ExperimentConfig &cfg);

enum class RandcondVariant { literal, absolute };

/// min over grid times of the double integral of
/// (u(y,t) - u(x,t)) W(x,y) (1 - W(x,y)), or of its absolute-value variant,
/// with W integrated exactly over the trajectory's cells.
double randcond_evaluate(const Kernel &k, const Trajectory &traj, RandcondVariant variant);

struct MonteCarloTrial {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double diameter_at_T = 0.0;
  double exceptional_measure = 0.0;
  bool success = false;  // exceptional_measure < c^2
  double exceedance = 0.0;        // measure of |u - u_n| > eps at T
  double chebyshev_bound = 0.0;   // (||u - u_n||_2 / eps)^2
  double binomial_se = 0.0;       // sqrt(p (1-p) / n) for the exceedance fraction
  double randcond_literal = 0.0;
  double randcond_absolute = 0.0;
};

struct MonteCarloSummary {
  std::size_t n = 0;
  double success_fraction = 0.0;
  double mean_exceptional_measure = 0.0;
  double max_randcond_literal_abs = 0.0;
  double min_randcond_absolute = 0.0;
};

struct MonteCarloReport {
  std::size_t reference_n = 0;
  std::vector<MonteCarloTrial> trials;  // ordered by (n, trial)
  std::vector<MonteCarloSummary> summary;
};

/// W-random Monte Carlo; trial i uses seed base_seed + i at every ladder size.
MonteCarloReport random_consensus_mc(const ExperimentConfig &cfg);

}  // namespace voterlab

#endif  // VOTERLAB_EXPERIMENTS_HPP
