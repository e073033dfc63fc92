#ifndef VOTERLAB_STRUCTURE_HPP
#define VOTERLAB_STRUCTURE_HPP

#include <cstddef>
#include <vector>

#include "voterlab/dynamics.hpp"
#include "voterlab/kernel.hpp"
#include "voterlab/piecewise.hpp"

namespace voterlab {

// Structural analysis works on the exact step form of a kernel (to_step).
// Cells a, b are adjacent when |values(a, b)| > zero_tol.

bool is_connected(const Kernel &k, double zero_tol = 0.0);

struct Component {
  /// Interval J_i occupied after relabeling components onto contiguous blocks.
  double lower = 0.0;
  double upper = 0.0;
  double weight = 0.0;                 // lambda(J_i)
  std::vector<std::size_t> cells;      // original cell indices, increasing
  StepKernel kernel;                   // induced kernel rescaled to [0,1]^2
  /// An isolated cell whose row is identically zero; the state never moves there.
  bool null = false;
};

struct ComponentDecomposition {
  Partition cells;                          // step partition of the input kernel
  std::vector<Component> components;        // ordered by smallest original cell
  std::vector<std::size_t> cell_component;  // original cell -> component
  std::vector<std::size_t> permutation;     // reassembled position -> original cell

  /// Direct sum of the components; equals the input with cells permuted.
  Kernel reassemble() const;
};

ComponentDecomposition connected_components(const Kernel &k, double zero_tol = 0.0);

/// The input step kernel with its cells reordered: cell p of the result is
/// cell permutation[p] of k.
StepKernel permute_cells(const StepKernel &k, const std::vector<std::size_t> &permutation);

struct TwinSet {
  std::vector<std::size_t> cells;
  /// multipliers[i] = a(cells[i], cells[0]): row cells[i] = multiplier * row cells[0].
  std::vector<double> multipliers;
  bool zero_rows = false;
  double measure = 0.0;
};

struct TwinSetPartition {
  Partition cells;
  std::vector<TwinSet> sets;  // ordered by smallest cell

  /// Maximal twin-sets cover [0,1]; always true for step kernels.
  bool is_twin_kernel() const;
};

/// Rows i, j are twins when |v_i ||v_j|| - sigma v_j ||v_i||| <= prop_tol
/// componentwise, sigma the sign relating their dominant entries. Zero rows
/// form one set.
TwinSetPartition find_maximal_twin_sets(const Kernel &k, double prop_tol = 1e-10);

struct NecessaryConditionReport {
  bool satisfied = false;
  std::vector<double> component_values;  // mean of g over each component
};

NecessaryConditionReport necessary_condition(const Kernel &k, const InitialCondition &g,
                                             double tol = 1e-10,
                                             double zero_tol = 0.0);

/// Predicted limit u*: on every non-null component the mean of g over it, on
/// null cells g itself. Throws UnsupportedError for kernels with negative values.
PiecewiseLinear predict_limit(const Kernel &k, const InitialCondition &g,
                              double zero_tol = 0.0);

/// Solves each component on its own (kernel a_i W_i, pulled-back initial
/// condition, n a_i cells) and reassembles on the original n-grid. Every
/// step boundary must lie on the n-grid.
Trajectory decompose_solution(const Kernel &k, const InitialCondition &g, std::size_t n,
                              const std::vector<double> &times,
                              const SolverOptions &options = {}, double zero_tol = 0.0);

}  // namespace voterlab

#endif  // VOTERLAB_STRUCTURE_HPP
