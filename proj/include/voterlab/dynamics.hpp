#ifndef VOTERLAB_DYNAMICS_HPP
#define VOTERLAB_DYNAMICS_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "voterlab/graph.hpp"
#include "voterlab/kernel.hpp"
#include "voterlab/piecewise.hpp"

namespace voterlab {

/// Cell values of a step function on the uniform n-partition.
using StateVector = Eigen::VectorXd;

enum class SolverMethod { expm, rk4 };

const char *to_string(SolverMethod m);
SolverMethod solver_method_from_string(const std::string &name);

struct SolverOptions {
  SolverMethod method = SolverMethod::expm;
  /// rk4: successive halvings must agree to this tolerance at the final time.
  double rk_tol = 1e-9;
  int rk_max_halvings = 20;
  /// rk4: initial step h satisfies h * ||D||_1 <= rk_step_bound.
  double rk_step_bound = 0.1;
  std::size_t n_max = kDefaultMaxVertices;
};

/// States at each grid time, stored column-wise (n x times.size()).
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;
  std::string solver;
  std::string source;     // "finite" or "continuum n-th approximation"
  double rk_step = 0.0;   // final accepted step when solver == "rk4"
  int rk_halvings = 0;

  std::size_t n() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t size() const { return times.size(); }
  auto state(std::size_t k) const { return states.col(static_cast<Eigen::Index>(k)); }
  auto initial() const { return state(0); }
  auto final_state() const { return state(size() - 1); }
};

/// 0, dt, 2 dt, ..., horizon (horizon included, last step may be shorter).
std::vector<double> uniform_times(double horizon, double dt);

/// Checks a grid starts at 0 and strictly increases.
void validate_times(const std::vector<double> &times);

/// Component i = n * integral of g over the i-th uniform cell.
StateVector average_initial(const InitialCondition &g, std::size_t n);

/// u' = D u, u(0) = u0 on the grid times.
Trajectory solve_finite(const WeightedGraph &g, const StateVector &u0,
                        const std::vector<double> &times,
                        const SolverOptions &options = {});

/// n-th approximating problem: finite model on discretize_kernel(k, n)
/// started from the cell averages of g.
Trajectory solve_continuum(const Kernel &k, const InitialCondition &g, std::size_t n,
                           const std::vector<double> &times,
                           const SolverOptions &options = {});

/// True when the integrals of g over [0,r] and [r,1] both vanish within tol.
bool in_zero_mean_family(double r, const InitialCondition &g, double tol = 1e-12);

/// Exact solution on the bipartite kernel for g in the zero-mean family:
/// g(x) e^{-t} for x >= r and g(x) e^{-(1-2r) t} for x < r.
double closed_form_bipartite(double r, const InitialCondition &g, double x, double t);

/// The same solution as a function of x at fixed t.
PiecewiseLinear closed_form_bipartite_profile(double r, const InitialCondition &g,
                                              double t);

/// max - min over cells (the ess-sup pairwise difference of the step function).
template <typename Derived>
typename Derived::Scalar consensus_diameter(const Eigen::MatrixBase<Derived> &s) {
  if (s.size() == 0) return typename Derived::Scalar(0);
  return s.maxCoeff() - s.minCoeff();
}

template <typename Derived>
typename Derived::Scalar mean_value(const Eigen::MatrixBase<Derived> &s) {
  return s.mean();
}

/// Smallest measure of cells whose removal leaves diameter <= eps.
/// Sort, then slide a window of width eps keeping the most cells.
template <typename Derived>
double exceptional_measure(const Eigen::MatrixBase<Derived> &s, double eps) {
  const auto n = static_cast<std::size_t>(s.size());
  if (n == 0) return 0.0;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = static_cast<double>(s.coeff(static_cast<Eigen::Index>(i)));
  }
  std::sort(v.begin(), v.end());
  std::size_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < n; ++hi) {
    while (v[hi] - v[lo] > eps) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return static_cast<double>(n - best) / static_cast<double>(n);
}

/// Integral-form residual: max over cells and grid times of
/// |u(x,t) - e^{-d t} u(x,0) - int_0^t e^{d (s-t)} (int W(x,y) u(y,s) dy) ds|
/// with exact y-integration. The s-integral uses a product trapezoid rule
/// (linear interpolation of the interaction term, exact exponential weight),
/// second order in the grid spacing and exact for stationary solutions.
double volterra_residual(const WeightedGraph &g, const Trajectory &traj);
double volterra_residual(const Kernel &k, const Trajectory &traj);

/// First grid time after which the diameter stays <= eps; empty otherwise.
std::optional<double> detect_consensus(const Trajectory &traj, double eps);

struct LimitEstimate {
  StateVector state;
  bool converged = false;
  double tail_oscillation = 0.0;
};

/// Final state as the limit estimate; converged when every cell moves by at
/// most limit_tol over the trailing tail_fraction of grid times.
LimitEstimate limit_state(const Trajectory &traj, double tail_fraction,
                          double limit_tol = 1e-8);

}  // namespace voterlab

#endif  // VOTERLAB_DYNAMICS_HPP
