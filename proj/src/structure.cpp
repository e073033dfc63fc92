#include "voterlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "voterlab/errors.hpp"

namespace voterlab {
namespace {

// Component label of every cell; labels follow the smallest cell index.
std::vector<std::size_t> label_components(const StepKernel &s, double zero_tol,
                                          std::size_t &count) {
  const std::size_t m = s.cells.size();
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(m, unseen);
  count = 0;
  for (std::size_t start = 0; start < m; ++start) {
    if (label[start] != unseen) continue;
    std::queue<std::size_t> q;
    q.push(start);
    label[start] = count;
    while (!q.empty()) {
      const std::size_t a = q.front();
      q.pop();
      for (std::size_t b = 0; b < m; ++b) {
        if (label[b] == unseen && std::abs(s.values(a, b)) > zero_tol) {
          label[b] = count;
          q.push(b);
        }
      }
    }
    ++count;
  }
  return label;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

bool is_connected(const Kernel &k, double zero_tol) {
  std::size_t count = 0;
  label_components(to_step(k), zero_tol, count);
  return count == 1;
}

ComponentDecomposition connected_components(const Kernel &k, double zero_tol) {
  const StepKernel s = to_step(k);
  std::size_t count = 0;
  const auto label = label_components(s, zero_tol, count);

  ComponentDecomposition dec{s.cells, {}, label, {}};
  dec.components.resize(count);
  for (std::size_t c = 0; c < label.size(); ++c) {
    dec.components[label[c]].cells.push_back(c);
  }
  double offset = 0.0;
  for (auto &comp : dec.components) {
    const auto m = static_cast<Eigen::Index>(comp.cells.size());
    double weight = 0.0;
    for (std::size_t c : comp.cells) weight += s.cells.measure(c);
    std::vector<double> b{0.0};
    double acc = 0.0;
    Eigen::MatrixXd v(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      acc += s.cells.measure(comp.cells[i]);
      b.push_back(acc / weight);
      for (Eigen::Index j = 0; j < m; ++j) {
        v(i, j) = s.values(comp.cells[i], comp.cells[j]);
      }
    }
    b.back() = 1.0;
    comp.weight = weight;
    comp.lower = offset;
    offset += weight;
    comp.upper = offset;
    comp.kernel = StepKernel{Partition(std::move(b)), std::move(v)};
    comp.null = m == 1 && std::abs(comp.kernel.values(0, 0)) <= zero_tol;
    dec.permutation.insert(dec.permutation.end(), comp.cells.begin(), comp.cells.end());
  }
  if (!dec.components.empty()) dec.components.back().upper = 1.0;
  return dec;
}

Kernel ComponentDecomposition::reassemble() const {
  std::vector<std::pair<double, Kernel>> parts;
  for (const auto &comp : components) parts.emplace_back(comp.weight, Kernel(comp.kernel));
  // component weights are sums of cell measures; renormalise rounding drift
  double total = 0.0;
  for (const auto &p : parts) total += p.first;
  for (auto &p : parts) p.first /= total;
  return direct_sum(parts);
}

StepKernel permute_cells(const StepKernel &k, const std::vector<std::size_t> &permutation) {
  const std::size_t m = k.cells.size();
  if (permutation.size() != m) throw ValidationError("permutation size mismatch");
  std::vector<double> b{0.0};
  Eigen::MatrixXd v(m, m);
  for (std::size_t p = 0; p < m; ++p) {
    b.push_back(b.back() + k.cells.measure(permutation[p]));
    for (std::size_t q = 0; q < m; ++q) v(p, q) = k.values(permutation[p], permutation[q]);
  }
  b.back() = 1.0;
  return StepKernel{Partition(std::move(b)), std::move(v)};
}

bool TwinSetPartition::is_twin_kernel() const {
  std::vector<int> seen(cells.size(), 0);
  for (const auto &set : sets) {
    for (std::size_t c : set.cells) ++seen[c];
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

TwinSetPartition find_maximal_twin_sets(const Kernel &k, double prop_tol) {
  if (!(prop_tol >= 0.0)) throw ValidationError("prop_tol must be nonnegative");
  const StepKernel s = to_step(k);
  const std::size_t m = s.cells.size();
  const Eigen::MatrixXd &v = s.values;
  Eigen::VectorXd norm(m);
  std::vector<Eigen::Index> dominant(m, 0);
  std::vector<bool> zero(m);
  for (std::size_t i = 0; i < m; ++i) {
    norm[i] = v.row(i).norm();
    v.row(i).cwiseAbs().maxCoeff(&dominant[i]);
    zero[i] = v.row(i).cwiseAbs().maxCoeff() <= prop_tol;
  }
  auto sign_between = [&](std::size_t i, std::size_t j) {
    return (v(i, dominant[i]) * v(j, dominant[i]) >= 0.0) ? 1.0 : -1.0;
  };
  auto proportional = [&](std::size_t i, std::size_t j) {
    if (zero[i] || zero[j]) return zero[i] && zero[j];
    if (v(j, dominant[i]) == 0.0) return false;
    const double sigma = sign_between(i, j);
    return ((v.row(i) * norm[j] - sigma * v.row(j) * norm[i]).cwiseAbs().maxCoeff() <=
            prop_tol);
  };

  DisjointSets ds(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (ds.find(i) != ds.find(j) && proportional(i, j)) ds.unite(i, j);
    }
  }

  TwinSetPartition out{s.cells, {}};
  std::vector<std::size_t> slot(m, static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t root = ds.find(c);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = out.sets.size();
      out.sets.push_back(TwinSet{{}, {}, zero[c], 0.0});
    }
    TwinSet &set = out.sets[slot[root]];
    const std::size_t rep = set.cells.empty() ? c : set.cells.front();
    set.cells.push_back(c);
    set.multipliers.push_back(zero[c] ? 1.0 : sign_between(rep, c) * norm[c] / norm[rep]);
    set.measure += s.cells.measure(c);
  }
  return out;
}

NecessaryConditionReport necessary_condition(const Kernel &k, const InitialCondition &g,
                                             double tol, double zero_tol) {
  const auto dec = connected_components(k, zero_tol);
  NecessaryConditionReport report;
  for (const auto &comp : dec.components) {
    double integral = 0.0;
    for (std::size_t c : comp.cells) {
      integral += g.integral(dec.cells.lower(c), dec.cells.upper(c));
    }
    report.component_values.push_back(integral / comp.weight);
  }
  const auto [lo, hi] = std::minmax_element(report.component_values.begin(),
                                            report.component_values.end());
  report.satisfied = *hi - *lo <= tol;
  return report;
}

PiecewiseLinear predict_limit(const Kernel &k, const InitialCondition &g, double zero_tol) {
  if (kernel_min(k) < 0.0) {
    throw UnsupportedError(
        "limit prediction requires a nonnegative kernel (graphon); negative values present");
  }
  const auto dec = connected_components(k, zero_tol);
  std::vector<double> mean(dec.components.size());
  for (std::size_t i = 0; i < dec.components.size(); ++i) {
    double integral = 0.0;
    for (std::size_t c : dec.components[i].cells) {
      integral += g.integral(dec.cells.lower(c), dec.cells.upper(c));
    }
    mean[i] = integral / dec.components[i].weight;
  }
  const PiecewiseLinear fine = g.refined(dec.cells);
  const Partition &pieces = fine.pieces();
  std::vector<double> left(pieces.size()), right(pieces.size());
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const std::size_t cell =
        dec.cells.locate(0.5 * (pieces.lower(j) + pieces.upper(j)));
    const std::size_t comp = dec.cell_component[cell];
    if (dec.components[comp].null) {
      left[j] = fine.left()[j];
      right[j] = fine.right()[j];
    } else {
      left[j] = right[j] = mean[comp];
    }
  }
  return PiecewiseLinear(pieces, std::move(left), std::move(right));
}

Trajectory decompose_solution(const Kernel &k, const InitialCondition &g, std::size_t n,
                              const std::vector<double> &times,
                              const SolverOptions &options, double zero_tol) {
  if (n == 0) throw ValidationError("n must be positive");
  check_size(n, options.n_max);
  const auto dec = connected_components(k, zero_tol);
  const double dn = static_cast<double>(n);
  for (double b : dec.cells.boundaries()) {
    if (std::abs(b * dn - std::round(b * dn)) > 1e-9) {
      throw ValidationError("step boundary " + std::to_string(b) +
                            " does not lie on the uniform grid with n = " +
                            std::to_string(n) + "; cells cannot be allocated per component");
    }
  }
  const Partition grid = Partition::uniform(n);
  std::vector<std::vector<Eigen::Index>> members(dec.components.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cell = dec.cells.locate(0.5 * (grid.lower(i) + grid.upper(i)));
    members[dec.cell_component[cell]].push_back(static_cast<Eigen::Index>(i));
  }

  const StateVector u0 = average_initial(g, n);
  Trajectory out;
  out.times = times;
  out.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(times.size()));
  out.solver = to_string(options.method);
  out.source = "component decomposition";
  for (std::size_t c = 0; c < dec.components.size(); ++c) {
    const auto &idx = members[c];
    const Kernel local = scaled(Kernel(dec.components[c].kernel), dec.components[c].weight);
    StateVector local_u0(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t p = 0; p < idx.size(); ++p) local_u0[p] = u0[idx[p]];
    const Trajectory part =
        solve_finite(discretize_kernel(local, idx.size(), options.n_max), local_u0, times,
                     options);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      out.states.row(idx[p]) = part.states.row(static_cast<Eigen::Index>(p));
    }
  }
  return out;
}

}  // namespace voterlab
