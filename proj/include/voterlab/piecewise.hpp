#ifndef VOTERLAB_PIECEWISE_HPP
#define VOTERLAB_PIECEWISE_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "voterlab/partition.hpp"

namespace voterlab {

/// A function on [0,1] that is linear on each cell of a partition.
///
/// Piece i takes value left(i) at lower(i) and right(i) at upper(i). Step
/// functions are the special case left == right. Adjacent constant pieces
/// with equal values are merged on construction, so two equal step functions
/// have identical representations.
class PiecewiseLinear {
 public:
  PiecewiseLinear(Partition pieces, std::vector<double> left,
                  std::vector<double> right);

  static PiecewiseLinear step(Partition pieces, std::vector<double> values);
  static PiecewiseLinear constant(double c);
  /// Step function with value values[i] on the i-th cell of the uniform grid.
  static PiecewiseLinear from_cells(const Eigen::Ref<const Eigen::VectorXd> &values);

  const Partition &pieces() const { return pieces_; }
  const std::vector<double> &left() const { return left_; }
  const std::vector<double> &right() const { return right_; }
  bool is_step() const;

  double operator()(double x) const;

  /// Exact integral over [a, b] with 0 <= a <= b <= 1.
  double integral(double a, double b) const;
  double integral() const { return integral(0.0, 1.0); }

  double sup_norm() const;
  double ess_max() const;
  double ess_min() const;

  /// Same function represented on the refinement with `extra` boundaries.
  PiecewiseLinear refined(const Partition &extra) const;

  /// f(x) * factor(piece containing x); factor indexed by the pieces of `at`.
  PiecewiseLinear scaled_on(const Partition &at,
                            const std::vector<double> &factors) const;

 private:
  Partition pieces_;
  std::vector<double> left_;
  std::vector<double> right_;
};

/// Initial conditions are piecewise-linear; step functions are the common case.
using InitialCondition = PiecewiseLinear;

/// n * integral of f over the i-th cell of the uniform n-grid, for every i.
Eigen::VectorXd cell_averages(const PiecewiseLinear &f, std::size_t n);

/// ||f - g||_2, exact.
double l2_distance(const PiecewiseLinear &f, const PiecewiseLinear &g);

/// Lebesgue measure of {x : |f(x) - g(x)| > eps}, exact.
double exceedance_measure(const PiecewiseLinear &f, const PiecewiseLinear &g,
                          double eps);

/// A member of the family with zero integral on [0,r] and on [r,1]:
/// a on [0,r/2], -a on (r/2,r], b on (r,(1+r)/2], -b on ((1+r)/2,1].
PiecewiseLinear zero_mean_two_block(double r, double a, double b);

}  // namespace voterlab

#endif  // VOTERLAB_PIECEWISE_HPP
