#include "voterlab/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "voterlab/errors.hpp"

namespace voterlab {
namespace {

Eigen::MatrixXd integrate_rk4(const Eigen::MatrixXd &d, const StateVector &u0,
                              const std::vector<double> &times, double h) {
  Eigen::MatrixXd out(u0.size(), static_cast<Eigen::Index>(times.size()));
  StateVector u = u0;
  out.col(0) = u;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const auto steps = static_cast<long>(std::ceil(span / h - 1e-12));
    const double dt = span / static_cast<double>(std::max(steps, 1L));
    for (long s = 0; s < std::max(steps, 1L); ++s) {
      const StateVector k1 = d * u;
      const StateVector k2 = d * (u + 0.5 * dt * k1);
      const StateVector k3 = d * (u + 0.5 * dt * k2);
      const StateVector k4 = d * (u + dt * k3);
      u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.col(static_cast<Eigen::Index>(k)) = u;
  }
  return out;
}

}  // namespace

const char *to_string(SolverMethod m) {
  return m == SolverMethod::expm ? "expm" : "rk4";
}

SolverMethod solver_method_from_string(const std::string &name) {
  if (name == "expm") return SolverMethod::expm;
  if (name == "rk" || name == "rk4") return SolverMethod::rk4;
  throw ValidationError("unknown solver method '" + name + "' (expected expm or rk4)");
}

std::vector<double> uniform_times(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw ValidationError("horizon and dt must be positive");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    t[k] = std::min(horizon, static_cast<double>(k) * dt);
  }
  t.back() = horizon;
  return t;
}

void validate_times(const std::vector<double> &times) {
  if (times.empty() || times.front() != 0.0) {
    throw ValidationError("time grid must start at 0");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1]) || !std::isfinite(times[k])) {
      throw ValidationError("time grid must strictly increase");
    }
  }
}

StateVector average_initial(const InitialCondition &g, std::size_t n) {
  return cell_averages(g, n);
}

Trajectory solve_finite(const WeightedGraph &g, const StateVector &u0,
                        const std::vector<double> &times, const SolverOptions &options) {
  if (static_cast<std::size_t>(u0.size()) != g.n()) {
    throw ValidationError("initial state has " + std::to_string(u0.size()) +
                          " entries but the graph has " + std::to_string(g.n()) +
                          " vertices");
  }
  check_size(g.n(), options.n_max);
  validate_times(times);
  if (!u0.allFinite()) throw ValidationError("initial state must be finite");

  const Eigen::MatrixXd d = laplacian(g);
  Trajectory traj;
  traj.times = times;
  traj.source = "finite";
  traj.solver = to_string(options.method);

  if (options.method == SolverMethod::expm) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
    if (eig.info() != Eigen::Success) {
      throw ConvergenceError("symmetric eigendecomposition failed");
    }
    const Eigen::MatrixXd &v = eig.eigenvectors();
    const Eigen::VectorXd coeff = v.transpose() * u0;
    traj.states.resize(u0.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Eigen::VectorXd growth = (eig.eigenvalues() * times[k]).array().exp();
      traj.states.col(static_cast<Eigen::Index>(k)) =
          k == 0 ? u0 : StateVector(v * growth.cwiseProduct(coeff));
    }
    return traj;
  }

  const double norm1 = d.cwiseAbs().colwise().sum().maxCoeff();
  const double span = times.back() > 0.0 ? times.back() : 1.0;
  double h = norm1 > 0.0 ? std::min(options.rk_step_bound / norm1, span) : span;
  Eigen::MatrixXd prev = integrate_rk4(d, u0, times, h);
  for (int halving = 1; halving <= options.rk_max_halvings; ++halving) {
    h *= 0.5;
    Eigen::MatrixXd cur = integrate_rk4(d, u0, times, h);
    const auto last = cur.cols() - 1;
    const double scale = std::max(1.0, cur.col(last).lpNorm<Eigen::Infinity>());
    if ((cur.col(last) - prev.col(last)).lpNorm<Eigen::Infinity>() < options.rk_tol * scale) {
      traj.states = std::move(cur);
      traj.rk_step = h;
      traj.rk_halvings = halving;
      return traj;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("rk4 did not reach rk_tol after " +
                         std::to_string(options.rk_max_halvings) + " halvings");
}

Trajectory solve_continuum(const Kernel &k, const InitialCondition &g, std::size_t n,
                           const std::vector<double> &times, const SolverOptions &options) {
  Trajectory traj = solve_finite(discretize_kernel(k, n, options.n_max),
                                 average_initial(g, n), times, options);
  traj.source = "continuum n-th approximation";
  return traj;
}

bool in_zero_mean_family(double r, const InitialCondition &g, double tol) {
  return std::abs(g.integral(0.0, r)) <= tol && std::abs(g.integral(r, 1.0)) <= tol;
}

namespace {
void require_zero_mean_family(double r, const InitialCondition &g) {
  if (!(r > 0.0 && r < 0.5)) throw ValidationError("bipartite kernel needs r in (0, 1/2)");
  if (!in_zero_mean_family(r, g)) {
    throw ValidationError("initial condition must integrate to zero on [0,r] and on [r,1]");
  }
}
}  // namespace

double closed_form_bipartite(double r, const InitialCondition &g, double x, double t) {
  require_zero_mean_family(r, g);
  const double rate = x < r ? 1.0 - 2.0 * r : 1.0;
  return g(x) * std::exp(-rate * t);
}

PiecewiseLinear closed_form_bipartite_profile(double r, const InitialCondition &g,
                                              double t) {
  require_zero_mean_family(r, g);
  return g.scaled_on(Partition({0.0, r, 1.0}),
                     {std::exp(-(1.0 - 2.0 * r) * t), std::exp(-t)});
}

namespace {
// Product trapezoid on one step of length h with a = d h: the interaction
// term is interpolated linearly and e^{d(s-t)} is integrated exactly.
// Returns the weights of the left and right values divided by h.
std::pair<double, double> trapezoid_weights(double a) {
  double phi, psi;
  if (std::abs(a) < 1e-3) {
    phi = 1.0 - a / 2.0 + a * a / 6.0 - a * a * a / 24.0;
    psi = 0.5 - a / 3.0 + a * a / 8.0 - a * a * a / 30.0;
  } else {
    phi = -std::expm1(-a) / a;
    psi = (-std::expm1(-a) - a * std::exp(-a)) / (a * a);
  }
  return {psi, phi - psi};
}
}  // namespace

double volterra_residual(const WeightedGraph &g, const Trajectory &traj) {
  if (traj.n() != g.n()) {
    throw ValidationError("trajectory and graph sizes differ");
  }
  if (traj.size() == 0) return 0.0;
  const double n = static_cast<double>(g.n());
  const Eigen::MatrixXd &beta = g.weights();
  const Eigen::ArrayXd deg = beta.rowwise().sum().array() / n;
  const StateVector u0 = traj.initial();
  Eigen::ArrayXd integral = Eigen::ArrayXd::Zero(u0.size());
  Eigen::ArrayXd f_prev = (beta * u0).array() / n;
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.times[k] - traj.times[k - 1];
    const Eigen::ArrayXd decay = (-deg * dt).exp();
    const Eigen::ArrayXd f = (beta * traj.state(k)).array() / n;
    Eigen::ArrayXd w_prev(f.size()), w_cur(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const auto [a, b] = trapezoid_weights(deg[i] * dt);
      w_prev[i] = a * dt;
      w_cur[i] = b * dt;
    }
    integral = decay * integral + w_prev * f_prev + w_cur * f;
    const Eigen::ArrayXd predicted =
        (-deg * traj.times[k]).exp() * u0.array() + integral;
    worst = std::max(worst, (traj.state(k).array() - predicted).abs().maxCoeff());
    f_prev = f;
  }
  return worst;
}

double volterra_residual(const Kernel &k, const Trajectory &traj) {
  return volterra_residual(discretize_kernel(k, traj.n()), traj);
}

std::optional<double> detect_consensus(const Trajectory &traj, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  std::optional<double> hit;
  for (std::size_t k = traj.size(); k-- > 0;) {
    if (consensus_diameter(traj.state(k)) > eps) break;
    hit = traj.times[k];
  }
  return hit;
}

LimitEstimate limit_state(const Trajectory &traj, double tail_fraction, double limit_tol) {
  if (traj.size() < 10) {
    throw ValidationError("limit estimation needs at least 10 grid times");
  }
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw ValidationError("tail_fraction must lie in (0,1)");
  }
  const auto count = static_cast<Eigen::Index>(std::max<double>(
      2.0, std::ceil(tail_fraction * static_cast<double>(traj.size()))));
  const auto tail = traj.states.rightCols(count);
  const Eigen::VectorXd osc = tail.rowwise().maxCoeff() - tail.rowwise().minCoeff();
  LimitEstimate est;
  est.state = traj.final_state();
  est.tail_oscillation = osc.size() ? osc.maxCoeff() : 0.0;
  est.converged = est.tail_oscillation <= limit_tol;
  return est;
}

}  // namespace voterlab
