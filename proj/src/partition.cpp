#include "voterlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voterlab/errors.hpp"

namespace voterlab {

Partition::Partition(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) {
    throw ValidationError("partition needs at least two boundaries");
  }
  if (boundaries_.front() != 0.0 || boundaries_.back() != 1.0) {
    throw ValidationError("partition must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (!(boundaries_[i] > boundaries_[i - 1])) {
      throw ValidationError("partition boundaries must strictly increase (at index " +
                            std::to_string(i) + ")");
    }
  }
}

Partition Partition::uniform(std::size_t cells) {
  if (cells == 0) throw ValidationError("uniform partition needs n >= 1");
  std::vector<double> b(cells + 1);
  const double n = static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) b[i] = static_cast<double>(i) / n;
  return Partition(std::move(b));
}

Eigen::VectorXd Partition::measures() const {
  Eigen::VectorXd m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = measure(i);
  return m;
}

std::size_t Partition::locate(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("coordinate " + std::to_string(x) + " outside [0,1]");
  }
  // first boundary >= x; cell i covers (b_i, b_{i+1}]
  auto it = std::lower_bound(boundaries_.begin() + 1, boundaries_.end(), x);
  return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

double Partition::to_unit(std::size_t i, double x) const {
  return std::clamp((x - lower(i)) / measure(i), 0.0, 1.0);
}

double Partition::from_unit(std::size_t i, double z) const {
  return lower(i) + z * measure(i);
}

Partition Partition::refine(const Partition &other) const {
  return Partition(merge_boundaries(boundaries_, other.boundaries_));
}

std::vector<double> merge_boundaries(const std::vector<double> &a,
                                     const std::vector<double> &b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  std::vector<double> out;
  out.reserve(all.size());
  for (double v : all) {
    if (out.empty() || v - out.back() > kBoundaryMergeTol) {
      out.push_back(v);
    }
  }
  // the endpoints are exact; snap the last kept value to 1
  out.back() = 1.0;
  out.front() = 0.0;
  return out;
}

Eigen::MatrixXd overlap_matrix(const Partition &rows, const Partition &cols) {
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(rows.size(), cols.size());
  std::size_t a = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    while (a < cols.size() && cols.upper(a) <= rows.lower(i)) ++a;
    for (std::size_t b = a; b < cols.size() && cols.lower(b) < rows.upper(i); ++b) {
      const double len = std::min(rows.upper(i), cols.upper(b)) -
                         std::max(rows.lower(i), cols.lower(b));
      if (len > 0.0) o(i, b) = len;
    }
  }
  return o;
}

}  // namespace voterlab
