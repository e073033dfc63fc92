#include "voterlab/graph.hpp"

#include <cmath>
#include <string>

#include "voterlab/errors.hpp"
#include "voterlab/rng.hpp"

namespace voterlab {

void check_size(std::size_t n, std::size_t n_max) {
  if (n > n_max) {
    throw SizeLimitError("n = " + std::to_string(n) + " exceeds n_max = " +
                         std::to_string(n_max));
  }
}

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() < 1 || weights_.rows() != weights_.cols()) {
    throw ValidationError("graph weights must be a non-empty square matrix");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || std::abs(w) > 1.0 + 1e-12) {
        throw ValidationError("edge weight outside [-1,1] at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
      if (std::abs(w - weights_(j, i)) > 1e-12) {
        throw ValidationError("graph weights must be symmetric");
      }
    }
  }
  weights_ = (0.5 * (weights_ + weights_.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
}

bool WeightedGraph::is_simple() const {
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) return false;
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      if (weights_(i, j) != 0.0 && weights_(i, j) != 1.0) return false;
    }
  }
  return true;
}

WeightedGraph discretize_kernel(const Kernel &k, std::size_t n, std::size_t n_max) {
  if (n == 0) throw ValidationError("n must be positive");
  check_size(n, n_max);
  const StepKernel s = to_step(k);
  Eigen::MatrixXd beta = uniform_cell_averages(s.cells, s.values, n);
  return WeightedGraph(beta.cwiseMax(-1.0).cwiseMin(1.0));
}

Kernel pixel_kernel(const WeightedGraph &g) {
  return step_kernel(Partition::uniform(g.n()), g.weights());
}

WeightedGraph sample_w_random(const Kernel &k, std::size_t n, std::uint64_t seed,
                              std::size_t n_max) {
  if (n == 0) throw ValidationError("n must be positive");
  if (!is_graphon(k)) {
    throw ValidationError("W-random graphs need a kernel with values in [0,1]");
  }
  check_size(n, n_max);
  const CounterRng rng(seed);
  const double dn = static_cast<double>(n);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(n, n);
  std::uint64_t counter = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      const double p = eval_kernel(k, static_cast<double>(i) / dn,
                                   static_cast<double>(j) / dn);
      if (rng.uniform(counter++) < p) {
        beta(i - 1, j - 1) = 1.0;
        beta(j - 1, i - 1) = 1.0;
      }
    }
  }
  return WeightedGraph(std::move(beta));
}

WeightedGraph blow_up(const WeightedGraph &g, const std::vector<std::size_t> &copies,
                      const std::vector<std::vector<double>> &scale) {
  const std::size_t n = g.n();
  if (copies.size() != n || scale.size() != n) {
    throw ValidationError("blow-up needs copies and scales for every vertex");
  }
  std::vector<std::size_t> owner;
  std::vector<double> mult;
  for (std::size_t v = 0; v < n; ++v) {
    if (copies[v] == 0) throw ValidationError("each vertex needs at least one copy");
    if (scale[v].size() != copies[v]) {
      throw ValidationError("vertex " + std::to_string(v) + " needs " +
                            std::to_string(copies[v]) + " multipliers");
    }
    for (double s : scale[v]) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw ValidationError("blow-up multipliers must be positive");
      }
      owner.push_back(v);
      mult.push_back(s);
    }
  }
  const auto m = static_cast<Eigen::Index>(owner.size());
  Eigen::MatrixXd beta(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double w = mult[a] * mult[b] * g.weight(owner[a], owner[b]);
      if (std::abs(w) > 1.0 + 1e-12) {
        throw ValidationError("blow-up weight " + std::to_string(w) +
                              " outside [-1,1]");
      }
      beta(a, b) = w;
    }
  }
  return WeightedGraph(std::move(beta));
}

}  // namespace voterlab
