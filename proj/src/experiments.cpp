#include "voterlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "voterlab/errors.hpp"

namespace voterlab {
namespace {

// The exact solution is available for the bipartite kernel with data in the
// matching zero-mean family.
std::optional<double> closed_form_radius(const ExperimentConfig &cfg) {
  if (const auto *b = cfg.kernel.get_if<BipartiteKernel>()) {
    if (in_zero_mean_family(b->r, cfg.initial)) return b->r;
  }
  return std::nullopt;
}

// Reference profiles u(., t_k) for every grid time.
std::vector<PiecewiseLinear> reference_profiles(const ExperimentConfig &cfg,
                                                const std::vector<double> &times,
                                                std::size_t reference_n,
                                                std::string &label) {
  std::vector<PiecewiseLinear> out;
  out.reserve(times.size());
  if (const auto r = closed_form_radius(cfg)) {
    label = "closed_form";
    for (double t : times) out.push_back(closed_form_bipartite_profile(*r, cfg.initial, t));
    return out;
  }
  label = "numeric n=" + std::to_string(reference_n);
  const Trajectory ref = solve_continuum(cfg.kernel, cfg.initial, reference_n, times, cfg.solver);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.push_back(PiecewiseLinear::from_cells(ref.state(k)));
  }
  return out;
}

}  // namespace

void validate(const ExperimentConfig &cfg) {
  if (cfg.ladder.empty()) throw ValidationError("n-ladder must not be empty");
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    if (cfg.ladder[i] == 0) throw ValidationError("ladder sizes must be positive");
    if (i > 0 && cfg.ladder[i] <= cfg.ladder[i - 1]) {
      throw ValidationError("n-ladder must be strictly increasing");
    }
  }
  if (!(cfg.eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(cfg.c > 0.0)) throw ValidationError("c must be positive");
  if (!(cfg.window > 0.0)) throw ValidationError("window D must be positive");
  if (!(cfg.horizon > 0.0)) throw ValidationError("horizon T must be positive");
  if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
  if (cfg.trials < 1) throw ValidationError("trials must be at least 1");
}

std::size_t resolved_reference_n(const ExperimentConfig &cfg) {
  if (cfg.reference_n != 0) return cfg.reference_n;
  return 4 * (cfg.ladder.empty() ? 1 : cfg.ladder.back());
}

ErrorTable convergence_study(const ExperimentConfig &cfg, std::size_t reference_n) {
  validate(cfg);
  const bool closed = closed_form_radius(cfg).has_value();
  if (!closed) {
    for (std::size_t n : cfg.ladder) {
      if (n != reference_n && reference_n < 4 * n) {
        throw ValidationError("reference_n = " + std::to_string(reference_n) +
                              " must be at least 4 x ladder entry " + std::to_string(n));
      }
    }
  }
  const auto times = uniform_times(cfg.horizon, cfg.dt);
  ErrorTable table;
  const auto ref = reference_profiles(cfg, times, reference_n, table.reference);
  table.rows.resize(cfg.ladder.size());
  detail::parallel_for(cfg.ladder.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t n = cfg.ladder[i];
    const Trajectory traj = solve_continuum(cfg.kernel, cfg.initial, n, times, cfg.solver);
    ErrorRow row;
    row.n = n;
    for (std::size_t k = 0; k < times.size(); ++k) {
      row.sup_l2_error = std::max(
          row.sup_l2_error, l2_distance(PiecewiseLinear::from_cells(traj.state(k)), ref[k]));
    }
    row.diameter_at_T = consensus_diameter(traj.final_state());
    row.exceptional_measure = exceptional_measure(traj.final_state(), cfg.eps);
    table.rows[i] = row;
  });
  return table;
}

ProximityReport consensus_proximity(const ExperimentConfig &cfg) {
  validate(cfg);
  const auto times = uniform_times(cfg.horizon, cfg.dt);
  const std::size_t reference_n =
      cfg.reference_n != 0 ? cfg.reference_n : cfg.ladder.back();
  ProximityReport report;
  report.threshold = cfg.c * cfg.c;
  const auto ref = reference_profiles(cfg, times, reference_n, report.reference);

  // first grid time after which the reference diameter stays <= eps/3
  std::optional<std::size_t> hit;
  for (std::size_t k = times.size(); k-- > 0;) {
    if (ref[k].ess_max() - ref[k].ess_min() > cfg.eps / 3.0) break;
    hit = k;
  }
  if (!hit) return report;
  report.consensus_reached = true;
  report.consensus_time = times[*hit];

  std::vector<double> grid;
  if (report.consensus_time > 0.0) grid.push_back(0.0);
  const auto window = uniform_times(cfg.window, cfg.dt);
  for (double s : window) grid.push_back(report.consensus_time + s);

  report.rows.resize(cfg.ladder.size());
  detail::parallel_for(cfg.ladder.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t n = cfg.ladder[i];
    const Trajectory traj = solve_continuum(cfg.kernel, cfg.initial, n, grid, cfg.solver);
    ProximityRow row;
    row.n = n;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid[k] < report.consensus_time) continue;
      row.max_exceptional_measure =
          std::max(row.max_exceptional_measure, exceptional_measure(traj.state(k), cfg.eps));
      row.max_diameter = std::max(row.max_diameter, consensus_diameter(traj.state(k)));
    }
    row.below_threshold = row.max_exceptional_measure < report.threshold;
    report.rows[i] = row;
  });
  return report;
}

double randcond_evaluate(const Kernel &k, const Trajectory &traj, RandcondVariant variant) {
  const StepKernel s = to_step(k);
  const Eigen::MatrixXd weight = uniform_cell_averages(
      s.cells, s.values.unaryExpr([](double w) { return w * (1.0 - w); }), traj.n());
  const auto n = static_cast<Eigen::Index>(traj.n());
  const double cell = 1.0 / static_cast<double>(n * n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto u = traj.state(k);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double diff = u[j] - u[i];
        sum += (variant == RandcondVariant::literal ? diff : std::abs(diff)) * weight(i, j);
      }
    }
    best = std::min(best, sum * cell);
  }
  return best;
}

MonteCarloReport random_consensus_mc(const ExperimentConfig &cfg) {
  validate(cfg);
  if (!is_graphon(cfg.kernel)) {
    throw ValidationError("Monte Carlo over W-random graphs needs a graphon kernel");
  }
  if (cfg.trials < 30) {
    throw ValidationError("success fractions need at least 30 trials per ladder entry");
  }
  MonteCarloReport report;
  report.reference_n = resolved_reference_n(cfg);
  const auto times = uniform_times(cfg.horizon, cfg.dt);
  const Trajectory ref = solve_continuum(cfg.kernel, cfg.initial, report.reference_n,
                                         {0.0, cfg.horizon}, cfg.solver);
  const PiecewiseLinear ref_T = PiecewiseLinear::from_cells(ref.final_state());

  const std::size_t per_n = cfg.trials;
  report.trials.resize(cfg.ladder.size() * per_n);
  detail::parallel_for(report.trials.size(), cfg.threads, [&](std::size_t slot) {
    MonteCarloTrial t;
    t.n = cfg.ladder[slot / per_n];
    t.trial = slot % per_n;
    t.seed = cfg.base_seed + t.trial;
    const WeightedGraph g = sample_w_random(cfg.kernel, t.n, t.seed, cfg.solver.n_max);
    const Trajectory traj = solve_finite(g, average_initial(cfg.initial, t.n), times, cfg.solver);
    const auto final = traj.final_state();
    t.diameter_at_T = consensus_diameter(final);
    t.exceptional_measure = exceptional_measure(final, cfg.eps);
    t.success = t.exceptional_measure < cfg.c * cfg.c;
    const PiecewiseLinear un = PiecewiseLinear::from_cells(final);
    t.exceedance = exceedance_measure(un, ref_T, cfg.eps);
    const double l2 = l2_distance(un, ref_T);
    t.chebyshev_bound = (l2 / cfg.eps) * (l2 / cfg.eps);
    t.binomial_se =
        std::sqrt(t.exceedance * (1.0 - t.exceedance) / static_cast<double>(t.n));
    t.randcond_literal = randcond_evaluate(cfg.kernel, traj, RandcondVariant::literal);
    t.randcond_absolute = randcond_evaluate(cfg.kernel, traj, RandcondVariant::absolute);
    report.trials[slot] = t;
  });

  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    MonteCarloSummary s;
    s.n = cfg.ladder[i];
    s.min_randcond_absolute = std::numeric_limits<double>::infinity();
    std::size_t wins = 0;
    for (std::size_t j = 0; j < per_n; ++j) {
      const auto &t = report.trials[i * per_n + j];
      wins += t.success ? 1 : 0;
      s.mean_exceptional_measure += t.exceptional_measure / static_cast<double>(per_n);
      s.max_randcond_literal_abs =
          std::max(s.max_randcond_literal_abs, std::abs(t.randcond_literal));
      s.min_randcond_absolute = std::min(s.min_randcond_absolute, t.randcond_absolute);
    }
    s.success_fraction = static_cast<double>(wins) / static_cast<double>(per_n);
    report.summary.push_back(s);
  }
  return report;
}

}  // namespace voterlab
