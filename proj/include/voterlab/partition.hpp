#ifndef VOTERLAB_PARTITION_HPP
#define VOTERLAB_PARTITION_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace voterlab {

/// Boundaries closer than this are treated as the same point when merging.
inline constexpr double kBoundaryMergeTol = 1e-14;

/// A partition 0 = b_0 < b_1 < ... < b_m = 1 of the unit interval into cells.
///
/// Cell i (zero-based) covers (b_i, b_{i+1}], except cell 0 which is closed at
/// zero. This is the membership convention used everywhere a point has to be
/// assigned to a cell.
class Partition {
 public:
  /// Throws ValidationError unless the boundaries start at 0, end at 1 and
  /// strictly increase.
  explicit Partition(std::vector<double> boundaries);
  /// The trivial one-cell partition.
  Partition() : boundaries_{0.0, 1.0} {}

  static Partition uniform(std::size_t cells);
  static Partition unit() { return uniform(1); }

  std::size_t size() const { return boundaries_.size() - 1; }
  const std::vector<double> &boundaries() const { return boundaries_; }

  double lower(std::size_t i) const { return boundaries_[i]; }
  double upper(std::size_t i) const { return boundaries_[i + 1]; }
  double measure(std::size_t i) const {
    return boundaries_[i + 1] - boundaries_[i];
  }
  Eigen::VectorXd measures() const;

  /// Cell containing x. Throws DomainError outside [0,1].
  std::size_t locate(double x) const;

  /// Affine map from cell i onto [0,1], and its inverse.
  double to_unit(std::size_t i, double x) const;
  double from_unit(std::size_t i, double z) const;

  /// Common refinement: union of both boundary sets.
  Partition refine(const Partition &other) const;

  bool operator==(const Partition &other) const = default;

 private:
  std::vector<double> boundaries_;
};

/// Union of boundary lists with near-duplicates merged. Input lists must each
/// be sorted and span [0,1].
std::vector<double> merge_boundaries(const std::vector<double> &a,
                                     const std::vector<double> &b);

/// overlap(i, a) = length of fine cell i intersected with coarse cell a.
Eigen::MatrixXd overlap_matrix(const Partition &rows, const Partition &cols);

}  // namespace voterlab

#endif  // VOTERLAB_PARTITION_HPP
