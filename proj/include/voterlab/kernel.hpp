#ifndef VOTERLAB_KERNEL_HPP
#define VOTERLAB_KERNEL_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "voterlab/partition.hpp"

namespace voterlab {

class Kernel;

/// Piecewise-constant kernel: values(a, b) on cell a x cell b.
struct StepKernel {
  Partition cells;
  Eigen::MatrixXd values;
};

struct ConstantKernel {
  double c;
};

/// -1 on [0,r)^2, +1 elsewhere.
struct BipartiteKernel {
  double r;
};

/// W(x,y) = f(x) f(y) for a step function f.
struct ProductKernel {
  Partition cells;
  Eigen::VectorXd f;
};

struct DirectSumPart {
  double weight;
  std::shared_ptr<const Kernel> kernel;
};

/// Block-diagonal combination; part i lives on an interval of length weight_i.
struct DirectSumKernel {
  std::vector<DirectSumPart> parts;
};

/// (1-p) W + p (1 - W) for a graphon W.
struct WattsStrogatzKernel {
  std::shared_ptr<const Kernel> base;
  double p;
};

/// A symmetric function [0,1]^2 -> [-1,1]. Immutable; cheap to copy.
class Kernel {
 public:
  using Variant = std::variant<StepKernel, ConstantKernel, BipartiteKernel,
                               ProductKernel, DirectSumKernel, WattsStrogatzKernel>;

  // Each constructor validates its invariants and throws ValidationError.
  Kernel(StepKernel k);
  Kernel(ConstantKernel k);
  Kernel(BipartiteKernel k);
  Kernel(ProductKernel k);
  Kernel(DirectSumKernel k);
  Kernel(WattsStrogatzKernel k);

  const Variant &variant() const { return *v_; }

  template <typename T>
  const T *get_if() const {
    return std::get_if<T>(v_.get());
  }

  /// "step", "constant", "bipartite", "product", "direct_sum" or "ws_mix".
  std::string type_name() const;

 private:
  std::shared_ptr<const Variant> v_;
};

Kernel step_kernel(Partition cells, Eigen::MatrixXd values);
Kernel constant_kernel(double c);
Kernel bipartite_kernel(double r);
Kernel product_kernel(Partition cells, Eigen::VectorXd f);
Kernel watts_strogatz_mix(const Kernel &base, double p);

/// Weights must be positive and sum to 1 within 1e-12.
Kernel direct_sum(const std::vector<std::pair<double, Kernel>> &parts);

/// W(x, y). Throws DomainError outside [0,1]^2.
double eval_kernel(const Kernel &k, double x, double y);

/// d_W(x) = integral of W(x, y) over y.
double degree_function(const Kernel &k, double x);

/// Exact piecewise-constant form of any built-in kernel.
StepKernel to_step(const Kernel &k);

double kernel_min(const Kernel &k);
double kernel_max(const Kernel &k);

/// Range contained in [0,1].
bool is_graphon(const Kernel &k);

/// factor * W as a step kernel; |factor| <= 1.
Kernel scaled(const Kernel &k, double factor);

/// ||k1 - k2||_2 by exact integration over the common refinement.
double l2_distance(const Kernel &k1, const Kernel &k2);

/// Midpoint rule on an m x m grid. Approximate: O(1/m) bias at jumps.
double l2_distance_midpoint(const Kernel &k1, const Kernel &k2, std::size_t m);

/// Same step kernel expressed on a finer partition.
StepKernel refine(const StepKernel &k, const Partition &finer);

/// Cell averages n^2 * integral over I_i x I_j of a piecewise-constant
/// function given by (cells, values), on the uniform n-grid. No range checks,
/// so transformed values (e.g. W(1-W)) may be passed.
Eigen::MatrixXd uniform_cell_averages(const Partition &cells,
                                      const Eigen::MatrixXd &values, std::size_t n);

}  // namespace voterlab

#endif  // VOTERLAB_KERNEL_HPP
