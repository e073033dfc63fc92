#ifndef VOTERLAB_TESTS_ORACLES_HPP
#define VOTERLAB_TESTS_ORACLES_HPP

// Independent reference computations used only by tests. None of these call
// into the code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Minimum measure of removed cells leaving diameter <= eps, by enumerating
/// every kept subset. n <= 16.
inline double exceptional_measure_bruteforce(const std::vector<double> &v, double eps) {
  const std::size_t n = v.size();
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double lo = INFINITY, hi = -INFINITY;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
        ++kept;
      }
    }
    if (hi - lo <= eps) best = std::max(best, kept);
  }
  return static_cast<double>(n - best) / static_cast<double>(n);
}

/// e^{A t} by scaling and squaring of a truncated Taylor series.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd &a, double t) {
  Eigen::MatrixXd m = a * t;
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  m /= std::pow(2.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Laplacian straight from the vector field (1/n) sum_j beta_ij (u_j - u_i).
inline Eigen::MatrixXd laplacian_from_vector_field(const Eigen::MatrixXd &beta) {
  const auto n = beta.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, k);
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += beta(i, j) * (e[j] - e[i]);
      f[i] = s / static_cast<double>(n);
    }
    d.col(k) = f;
  }
  return d;
}

/// n^2 * integral over I_i x I_j of w by a midpoint rule with `sub` points per
/// cell side. Exact for step functions whose jumps lie on the subgrid.
inline Eigen::MatrixXd cell_average_quadrature(const std::function<double(double, double)> &w,
                                              int n, int sub) {
  Eigen::MatrixXd out(n, n);
  const double h = 1.0 / (static_cast<double>(n) * sub);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < sub; ++a) {
        for (int b = 0; b < sub; ++b) {
          s += w((i * sub + a + 0.5) * h, (j * sub + b + 0.5) * h);
        }
      }
      out(i, j) = s / (sub * sub);
    }
  }
  return out;
}

/// Janson connectivity of a step kernel by enumerating every union of cells
/// S with 0 < |S| < 1 and checking the cross mass. m <= 14.
inline bool janson_connected_bruteforce(const Eigen::MatrixXd &values,
                                        const std::vector<double> &measures) {
  const std::size_t m = measures.size();
  for (std::uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
    double cross = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if ((mask >> a & 1u) && !(mask >> b & 1u)) {
          cross += std::abs(values(a, b)) * measures[a] * measures[b];
        }
      }
    }
    if (cross == 0.0) return false;
  }
  return true;
}

/// Are rows i and j of `values` proportional? Compares every 2x2 minor.
inline bool rows_proportional(const Eigen::MatrixXd &values, Eigen::Index i, Eigen::Index j,
                              double tol = 1e-12) {
  for (Eigen::Index a = 0; a < values.cols(); ++a) {
    for (Eigen::Index b = 0; b < values.cols(); ++b) {
      if (std::abs(values(i, a) * values(j, b) - values(i, b) * values(j, a)) > tol) {
        return false;
      }
    }
  }
  const bool zi = values.row(i).cwiseAbs().maxCoeff() == 0.0;
  const bool zj = values.row(j).cwiseAbs().maxCoeff() == 0.0;
  return zi == zj;
}

/// Random symmetric step kernel values on a random partition.
struct RandomStep {
  std::vector<double> boundaries;
  Eigen::MatrixXd values;
};

inline RandomStep random_step(std::mt19937_64 &rng, int max_cells, bool nonnegative,
                              double zero_probability = 0.0) {
  std::uniform_int_distribution<int> cells(1, max_cells);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = cells(rng);
  std::vector<double> cuts;
  while (static_cast<int>(cuts.size()) < m - 1) {
    const double c = unit(rng);
    if (c > 1e-3 && c < 1 - 1e-3 &&
        std::none_of(cuts.begin(), cuts.end(), [&](double d) { return std::abs(c - d) < 1e-3; })) {
      cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  RandomStep out;
  out.boundaries.push_back(0.0);
  out.boundaries.insert(out.boundaries.end(), cuts.begin(), cuts.end());
  out.boundaries.push_back(1.0);
  out.values.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      double v = nonnegative ? unit(rng) : 2.0 * unit(rng) - 1.0;
      if (unit(rng) < zero_probability) v = 0.0;
      out.values(a, b) = out.values(b, a) = v;
    }
  }
  return out;
}

}  // namespace oracle

#endif  // VOTERLAB_TESTS_ORACLES_HPP
