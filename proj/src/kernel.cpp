#include "voterlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voterlab/errors.hpp"

namespace voterlab {
namespace {

constexpr double kValueTol = 1e-12;
constexpr double kWeightSumTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_unit_value(double v, const char *what) {
  if (!std::isfinite(v) || std::abs(v) > 1.0 + kValueTol) {
    throw ValidationError(std::string(what) + " must lie in [-1,1]");
  }
}

void check_coordinate(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("coordinate " + std::to_string(x) + " outside [0,1]");
  }
}

StepKernel validated(StepKernel k) {
  const auto m = static_cast<Eigen::Index>(k.cells.size());
  if (k.values.rows() != m || k.values.cols() != m) {
    throw ValidationError("step kernel values must be " + std::to_string(m) +
                          "x" + std::to_string(m));
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      check_unit_value(k.values(a, b), "step kernel value");
      if (std::abs(k.values(a, b) - k.values(b, a)) > kValueTol) {
        throw ValidationError("step kernel values must be symmetric");
      }
    }
  }
  // snap away rounding noise so eval is exactly symmetric
  k.values = (0.5 * (k.values + k.values.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
  return k;
}

std::vector<double> part_offsets(const DirectSumKernel &k) {
  std::vector<double> c{0.0};
  for (const auto &p : k.parts) c.push_back(c.back() + p.weight);
  c.back() = 1.0;
  return c;
}

std::size_t block_of(const std::vector<double> &offsets, double x) {
  auto it = std::lower_bound(offsets.begin() + 1, offsets.end() - 1, x);
  return static_cast<std::size_t>(it - offsets.begin()) - 1;
}

double to_block(const std::vector<double> &offsets, std::size_t i, double x) {
  return std::clamp((x - offsets[i]) / (offsets[i + 1] - offsets[i]), 0.0, 1.0);
}

}  // namespace

Kernel::Kernel(StepKernel k)
    : v_(std::make_shared<const Variant>(validated(std::move(k)))) {}

Kernel::Kernel(ConstantKernel k) : v_(nullptr) {
  check_unit_value(k.c, "constant kernel value");
  v_ = std::make_shared<const Variant>(k);
}

Kernel::Kernel(BipartiteKernel k) : v_(nullptr) {
  if (!(k.r > 0.0 && k.r < 0.5)) {
    throw ValidationError("bipartite kernel needs r in (0, 1/2)");
  }
  v_ = std::make_shared<const Variant>(k);
}

Kernel::Kernel(ProductKernel k) : v_(nullptr) {
  if (static_cast<std::size_t>(k.f.size()) != k.cells.size()) {
    throw ValidationError("product kernel needs one f value per cell");
  }
  for (double v : k.f) check_unit_value(v, "product factor");
  v_ = std::make_shared<const Variant>(std::move(k));
}

Kernel::Kernel(DirectSumKernel k) : v_(nullptr) {
  if (k.parts.empty()) throw ValidationError("direct sum needs at least one part");
  double total = 0.0;
  for (const auto &p : k.parts) {
    if (!(p.weight > 0.0)) throw ValidationError("direct sum weights must be positive");
    if (!p.kernel) throw ValidationError("direct sum part without kernel");
    total += p.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw ValidationError("direct sum weights must sum to 1 (got " +
                          std::to_string(total) + ")");
  }
  v_ = std::make_shared<const Variant>(std::move(k));
}

Kernel::Kernel(WattsStrogatzKernel k) : v_(nullptr) {
  if (!(k.p >= 0.0 && k.p <= 0.5)) {
    throw ValidationError("Watts-Strogatz mixing needs p in [0, 0.5]");
  }
  if (!k.base || !is_graphon(*k.base)) {
    throw ValidationError("Watts-Strogatz base kernel must take values in [0,1]");
  }
  v_ = std::make_shared<const Variant>(std::move(k));
}

std::string Kernel::type_name() const {
  return std::visit(overloaded{
                        [](const StepKernel &) { return "step"; },
                        [](const ConstantKernel &) { return "constant"; },
                        [](const BipartiteKernel &) { return "bipartite"; },
                        [](const ProductKernel &) { return "product"; },
                        [](const DirectSumKernel &) { return "direct_sum"; },
                        [](const WattsStrogatzKernel &) { return "ws_mix"; },
                    },
                    *v_);
}

Kernel step_kernel(Partition cells, Eigen::MatrixXd values) {
  return Kernel(StepKernel{std::move(cells), std::move(values)});
}
Kernel constant_kernel(double c) { return Kernel(ConstantKernel{c}); }
Kernel bipartite_kernel(double r) { return Kernel(BipartiteKernel{r}); }
Kernel product_kernel(Partition cells, Eigen::VectorXd f) {
  return Kernel(ProductKernel{std::move(cells), std::move(f)});
}
Kernel watts_strogatz_mix(const Kernel &base, double p) {
  return Kernel(WattsStrogatzKernel{std::make_shared<const Kernel>(base), p});
}

Kernel direct_sum(const std::vector<std::pair<double, Kernel>> &parts) {
  DirectSumKernel k;
  for (const auto &[w, kernel] : parts) {
    k.parts.push_back({w, std::make_shared<const Kernel>(kernel)});
  }
  return Kernel(std::move(k));
}

double eval_kernel(const Kernel &k, double x, double y) {
  check_coordinate(x);
  check_coordinate(y);
  return std::visit(
      overloaded{
          [&](const StepKernel &s) {
            return s.values(s.cells.locate(x), s.cells.locate(y));
          },
          [](const ConstantKernel &c) { return c.c; },
          [&](const BipartiteKernel &b) { return (x < b.r && y < b.r) ? -1.0 : 1.0; },
          [&](const ProductKernel &p) {
            return p.f[p.cells.locate(x)] * p.f[p.cells.locate(y)];
          },
          [&](const DirectSumKernel &d) {
            const auto off = part_offsets(d);
            const std::size_t i = block_of(off, x);
            if (i != block_of(off, y)) return 0.0;
            return eval_kernel(*d.parts[i].kernel, to_block(off, i, x),
                               to_block(off, i, y));
          },
          [&](const WattsStrogatzKernel &w) {
            const double v = eval_kernel(*w.base, x, y);
            return (1.0 - w.p) * v + w.p * (1.0 - v);
          },
      },
      k.variant());
}

double degree_function(const Kernel &k, double x) {
  check_coordinate(x);
  return std::visit(
      overloaded{
          [&](const StepKernel &s) {
            return s.values.row(s.cells.locate(x)).dot(s.cells.measures());
          },
          [](const ConstantKernel &c) { return c.c; },
          [&](const BipartiteKernel &b) { return x < b.r ? 1.0 - 2.0 * b.r : 1.0; },
          [&](const ProductKernel &p) {
            return p.f[p.cells.locate(x)] * p.f.dot(p.cells.measures());
          },
          [&](const DirectSumKernel &d) {
            const auto off = part_offsets(d);
            const std::size_t i = block_of(off, x);
            return d.parts[i].weight *
                   degree_function(*d.parts[i].kernel, to_block(off, i, x));
          },
          [&](const WattsStrogatzKernel &w) {
            return (1.0 - 2.0 * w.p) * degree_function(*w.base, x) + w.p;
          },
      },
      k.variant());
}

StepKernel to_step(const Kernel &k) {
  return std::visit(
      overloaded{
          [](const StepKernel &s) { return s; },
          [](const ConstantKernel &c) {
            return StepKernel{Partition::unit(), Eigen::MatrixXd::Constant(1, 1, c.c)};
          },
          [](const BipartiteKernel &b) {
            Eigen::MatrixXd v(2, 2);
            v << -1.0, 1.0, 1.0, 1.0;
            return StepKernel{Partition({0.0, b.r, 1.0}), v};
          },
          [](const ProductKernel &p) {
            return StepKernel{p.cells, p.f * p.f.transpose()};
          },
          [](const DirectSumKernel &d) {
            std::vector<StepKernel> blocks;
            std::vector<double> b{0.0};
            double offset = 0.0;
            Eigen::Index total = 0;
            for (const auto &part : d.parts) {
              blocks.push_back(to_step(*part.kernel));
              const auto &pb = blocks.back().cells.boundaries();
              for (std::size_t j = 1; j < pb.size(); ++j) {
                b.push_back(offset + part.weight * pb[j]);
              }
              offset += part.weight;
              total += blocks.back().values.rows();
            }
            b.back() = 1.0;
            Eigen::MatrixXd v = Eigen::MatrixXd::Zero(total, total);
            Eigen::Index at = 0;
            for (const auto &blk : blocks) {
              const auto m = blk.values.rows();
              v.block(at, at, m, m) = blk.values;
              at += m;
            }
            return StepKernel{Partition(std::move(b)), v};
          },
          [](const WattsStrogatzKernel &w) {
            StepKernel s = to_step(*w.base);
            s.values = ((1.0 - 2.0 * w.p) * s.values.array() + w.p).matrix();
            return s;
          },
      },
      k.variant());
}

double kernel_min(const Kernel &k) { return to_step(k).values.minCoeff(); }
double kernel_max(const Kernel &k) { return to_step(k).values.maxCoeff(); }

bool is_graphon(const Kernel &k) {
  const StepKernel s = to_step(k);
  return s.values.minCoeff() >= 0.0 && s.values.maxCoeff() <= 1.0;
}

Kernel scaled(const Kernel &k, double factor) {
  if (!(std::abs(factor) <= 1.0)) throw ValidationError("scale factor must lie in [-1,1]");
  StepKernel s = to_step(k);
  s.values *= factor;
  return Kernel(std::move(s));
}

StepKernel refine(const StepKernel &k, const Partition &finer) {
  const Eigen::Index m = static_cast<Eigen::Index>(finer.size());
  std::vector<std::size_t> owner(finer.size());
  for (std::size_t j = 0; j < finer.size(); ++j) {
    owner[j] = k.cells.locate(0.5 * (finer.lower(j) + finer.upper(j)));
  }
  Eigen::MatrixXd v(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) v(a, b) = k.values(owner[a], owner[b]);
  }
  return StepKernel{finer, v};
}

double l2_distance(const Kernel &k1, const Kernel &k2) {
  const StepKernel s1 = to_step(k1);
  const StepKernel s2 = to_step(k2);
  const Partition common = s1.cells.refine(s2.cells);
  const Eigen::MatrixXd diff = refine(s1, common).values - refine(s2, common).values;
  const Eigen::VectorXd m = common.measures();
  const double sq = (m.transpose() * diff.cwiseAbs2() * m)(0, 0);
  return std::sqrt(std::max(sq, 0.0));
}

double l2_distance_midpoint(const Kernel &k1, const Kernel &k2, std::size_t m) {
  if (m == 0) throw ValidationError("quadrature resolution must be positive");
  const double h = 1.0 / static_cast<double>(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < m; ++j) {
      const double y = (static_cast<double>(j) + 0.5) * h;
      const double d = eval_kernel(k1, x, y) - eval_kernel(k2, x, y);
      sum += d * d;
    }
  }
  return std::sqrt(sum * h * h);
}

Eigen::MatrixXd uniform_cell_averages(const Partition &cells,
                                      const Eigen::MatrixXd &values, std::size_t n) {
  const Partition grid = Partition::uniform(n);
  const double dn = static_cast<double>(n);
  const Eigen::MatrixXd o = overlap_matrix(grid, cells) * dn;  // rows sum to 1
  return o * values * o.transpose();
}

}  // namespace voterlab
