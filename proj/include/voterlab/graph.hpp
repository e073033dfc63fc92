#ifndef VOTERLAB_GRAPH_HPP
#define VOTERLAB_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "voterlab/kernel.hpp"

namespace voterlab {

/// Largest vertex count for which dense operators are built.
inline constexpr std::size_t kDefaultMaxVertices = 4096;

/// Throws SizeLimitError when n exceeds n_max.
void check_size(std::size_t n, std::size_t n_max);

/// Symmetric edge weights in [-1,1] on n >= 1 vertices. Self-weights allowed.
class WeightedGraph {
 public:
  explicit WeightedGraph(Eigen::MatrixXd weights);

  std::size_t n() const { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd &weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// 0/1 weights with an empty diagonal.
  bool is_simple() const;

 private:
  Eigen::MatrixXd weights_;
};

/// D = (1/n) (B - diag(rowsum B)). The diagonal of B cancels, so
/// D_ii = -(1/n) sum_{j != i} B_ij and every row of D sums to zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
laplacian_matrix(const Eigen::MatrixBase<Derived> &weights) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Scalar n = static_cast<Scalar>(weights.rows());
  Matrix d = weights / n;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    Scalar off = Scalar(0);
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (j != i) off += weights(i, j);
    }
    d(i, i) = -off / n;
  }
  return d;
}

/// Scaled negative Laplacian driving the linear voter model.
inline Eigen::MatrixXd laplacian(const WeightedGraph &g) {
  return laplacian_matrix(g.weights());
}

/// beta_ij = n^2 * integral of W over I_i x I_j, exact for built-in kernels.
WeightedGraph discretize_kernel(const Kernel &k, std::size_t n,
                                std::size_t n_max = kDefaultMaxVertices);

/// Step kernel on the uniform n-partition with values beta_ij.
Kernel pixel_kernel(const WeightedGraph &g);

/// Simple random graph, edge {i,j} (1-based, i<j) present with probability
/// W(i/n, j/n). Decisions consume counters 0,1,2,... in row-major i<j order.
WeightedGraph sample_w_random(const Kernel &k, std::size_t n, std::uint64_t seed,
                              std::size_t n_max = kDefaultMaxVertices);

/// Replace vertex v by copies[v] copies; copy c of v carries multiplier
/// scale[v][c] and the weight between copies (u,c), (v,c') is
/// scale[u][c] * scale[v][c'] * beta_uv. Copies of vertex 0 come first.
WeightedGraph blow_up(const WeightedGraph &g, const std::vector<std::size_t> &copies,
                      const std::vector<std::vector<double>> &scale);

}  // namespace voterlab

#endif  // VOTERLAB_GRAPH_HPP
