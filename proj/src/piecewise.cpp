#include "voterlab/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include "voterlab/errors.hpp"

namespace voterlab {
namespace {

double interpolate(double lo, double hi, double vlo, double vhi, double x) {
  if (vlo == vhi) return vlo;
  return vlo + (vhi - vlo) * ((x - lo) / (hi - lo));
}

// Value of piece i's linear formula at x (x may sit on either end of the piece).
double piece_value(const PiecewiseLinear &f, std::size_t i, double x) {
  const auto &p = f.pieces();
  return interpolate(p.lower(i), p.upper(i), f.left()[i], f.right()[i], x);
}

std::size_t piece_at_midpoint(const Partition &p, double lo, double hi) {
  return p.locate(0.5 * (lo + hi));
}

// Measure of {s in [0,h] : d(s) > level} for d linear from d0 to d1.
double measure_above(double d0, double d1, double h, double level) {
  if (d0 == d1) return d0 > level ? h : 0.0;
  const double s = (level - d0) / (d1 - d0);
  const double frac = d1 > d0 ? 1.0 - s : s;
  return h * std::clamp(frac, 0.0, 1.0);
}

}  // namespace

PiecewiseLinear::PiecewiseLinear(Partition pieces, std::vector<double> left,
                                 std::vector<double> right)
    : pieces_(Partition::unit()) {
  if (left.size() != pieces.size() || right.size() != pieces.size()) {
    throw ValidationError("piecewise function needs one value pair per piece");
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (!std::isfinite(left[i]) || !std::isfinite(right[i])) {
      throw ValidationError("piecewise function values must be finite");
    }
  }
  std::vector<double> b{0.0};
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const bool flat = left[i] == right[i];
    if (!left_.empty() && flat && left_.back() == right_.back() &&
        left_.back() == left[i]) {
      b.back() = pieces.upper(i);  // extend previous constant piece
      continue;
    }
    left_.push_back(left[i]);
    right_.push_back(right[i]);
    b.push_back(pieces.upper(i));
  }
  pieces_ = Partition(std::move(b));
}

PiecewiseLinear PiecewiseLinear::step(Partition pieces, std::vector<double> values) {
  auto copy = values;
  return PiecewiseLinear(std::move(pieces), std::move(values), std::move(copy));
}

PiecewiseLinear PiecewiseLinear::constant(double c) {
  return step(Partition::unit(), {c});
}

PiecewiseLinear PiecewiseLinear::from_cells(
    const Eigen::Ref<const Eigen::VectorXd> &values) {
  Partition cells = Partition::uniform(static_cast<std::size_t>(values.size()));
  return step(std::move(cells), std::vector<double>(values.data(), values.data() + values.size()));
}

bool PiecewiseLinear::is_step() const { return left_ == right_; }

double PiecewiseLinear::operator()(double x) const {
  return piece_value(*this, pieces_.locate(x), x);
}

double PiecewiseLinear::integral(double a, double b) const {
  if (!(0.0 <= a && a <= b && b <= 1.0)) {
    throw DomainError("integration bounds must satisfy 0 <= a <= b <= 1");
  }
  if (a == b) return 0.0;
  double sum = 0.0;
  for (std::size_t i = pieces_.locate(a); i < pieces_.size(); ++i) {
    const double lo = std::max(a, pieces_.lower(i));
    const double hi = std::min(b, pieces_.upper(i));
    if (hi > lo) {
      sum += 0.5 * (hi - lo) * (piece_value(*this, i, lo) + piece_value(*this, i, hi));
    }
    if (pieces_.upper(i) >= b) break;
  }
  return sum;
}

double PiecewiseLinear::sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < left_.size(); ++i) {
    m = std::max({m, std::abs(left_[i]), std::abs(right_[i])});
  }
  return m;
}

double PiecewiseLinear::ess_max() const {
  return std::max(*std::max_element(left_.begin(), left_.end()),
                  *std::max_element(right_.begin(), right_.end()));
}

double PiecewiseLinear::ess_min() const {
  return std::min(*std::min_element(left_.begin(), left_.end()),
                  *std::min_element(right_.begin(), right_.end()));
}

PiecewiseLinear PiecewiseLinear::refined(const Partition &extra) const {
  const Partition fine = pieces_.refine(extra);
  std::vector<double> l(fine.size()), r(fine.size());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const std::size_t i = piece_at_midpoint(pieces_, fine.lower(j), fine.upper(j));
    l[j] = piece_value(*this, i, fine.lower(j));
    r[j] = piece_value(*this, i, fine.upper(j));
  }
  return PiecewiseLinear(fine, std::move(l), std::move(r));
}

PiecewiseLinear PiecewiseLinear::scaled_on(const Partition &at,
                                           const std::vector<double> &factors) const {
  if (factors.size() != at.size()) {
    throw ValidationError("one factor per cell required");
  }
  const Partition fine = pieces_.refine(at);
  std::vector<double> l(fine.size()), r(fine.size());
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const double lo = fine.lower(j), hi = fine.upper(j);
    const std::size_t i = piece_at_midpoint(pieces_, lo, hi);
    const double s = factors[piece_at_midpoint(at, lo, hi)];
    l[j] = s * piece_value(*this, i, lo);
    r[j] = s * piece_value(*this, i, hi);
  }
  return PiecewiseLinear(fine, std::move(l), std::move(r));
}

Eigen::VectorXd cell_averages(const PiecewiseLinear &f, std::size_t n) {
  if (n == 0) throw ValidationError("cell count must be positive");
  const Partition grid = Partition::uniform(n);
  Eigen::VectorXd out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = f.integral(grid.lower(i), grid.upper(i)) / grid.measure(i);
  }
  return out;
}

double l2_distance(const PiecewiseLinear &f, const PiecewiseLinear &g) {
  const Partition fine = f.pieces().refine(g.pieces());
  double sum = 0.0;
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const double lo = fine.lower(j), hi = fine.upper(j);
    const std::size_t fi = piece_at_midpoint(f.pieces(), lo, hi);
    const std::size_t gi = piece_at_midpoint(g.pieces(), lo, hi);
    const double d0 = piece_value(f, fi, lo) - piece_value(g, gi, lo);
    const double d1 = piece_value(f, fi, hi) - piece_value(g, gi, hi);
    sum += (hi - lo) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  }
  return std::sqrt(sum);
}

double exceedance_measure(const PiecewiseLinear &f, const PiecewiseLinear &g,
                          double eps) {
  const Partition fine = f.pieces().refine(g.pieces());
  double total = 0.0;
  for (std::size_t j = 0; j < fine.size(); ++j) {
    const double lo = fine.lower(j), hi = fine.upper(j);
    const std::size_t fi = piece_at_midpoint(f.pieces(), lo, hi);
    const std::size_t gi = piece_at_midpoint(g.pieces(), lo, hi);
    const double d0 = piece_value(f, fi, lo) - piece_value(g, gi, lo);
    const double d1 = piece_value(f, fi, hi) - piece_value(g, gi, hi);
    total += measure_above(d0, d1, hi - lo, eps) + measure_above(-d0, -d1, hi - lo, eps);
  }
  return total;
}

PiecewiseLinear zero_mean_two_block(double r, double a, double b) {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError("r must lie in (0,1)");
  return PiecewiseLinear::step(Partition({0.0, 0.5 * r, r, 0.5 * (1.0 + r), 1.0}),
                               {a, -a, b, -b});
}

}  // namespace voterlab
