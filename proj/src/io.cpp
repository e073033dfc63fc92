#include "voterlab/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "voterlab/errors.hpp"
#include "voterlab/rng.hpp"

namespace voterlab {
namespace {

const json &field(const json &doc, const char *key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

template <typename T>
T get(const json &doc, const char *key) {
  try {
    return field(doc, key).get<T>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json &doc, const char *key, T fallback) {
  if (!doc.is_object() || !doc.contains(key)) return fallback;
  return get<T>(doc, key);
}

std::vector<double> doubles(const json &doc, const char *key) {
  return get<std::vector<double>>(doc, key);
}

Eigen::MatrixXd square_matrix(const json &rows, const char *what) {
  if (!rows.is_array() || rows.empty()) {
    throw ValidationError(std::string(what) + " must be a non-empty array of rows");
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const json &row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw ValidationError(std::string(what) + " must be square");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const json &v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
      out(i, j) = v.get<double>();
    }
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Kernel make_kernel(const json &spec) {
  const auto type = get<std::string>(spec, "type");
  if (type == "step") {
    return step_kernel(Partition(doubles(spec, "boundaries")),
                       square_matrix(field(spec, "values"), "values"));
  }
  if (type == "constant") return constant_kernel(get<double>(spec, "c"));
  if (type == "bipartite") return bipartite_kernel(get<double>(spec, "r"));
  if (type == "product") {
    const auto f = doubles(spec, "f");
    return product_kernel(Partition(doubles(spec, "boundaries")),
                          Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()));
  }
  if (type == "direct_sum") {
    const json &parts = field(spec, "parts");
    if (!parts.is_array()) throw ValidationError("direct_sum parts must be an array");
    std::vector<std::pair<double, Kernel>> list;
    for (const json &p : parts) {
      list.emplace_back(get<double>(p, "weight"), make_kernel(field(p, "kernel")));
    }
    return direct_sum(list);
  }
  if (type == "ws_mix") {
    return watts_strogatz_mix(make_kernel(field(spec, "base")), get<double>(spec, "p"));
  }
  throw ValidationError("unknown kernel type '" + type + "'");
}

json kernel_to_json(const Kernel &k) {
  return std::visit(
      overloaded{
          [](const StepKernel &s) {
            return json{{"type", "step"},
                        {"boundaries", s.cells.boundaries()},
                        {"values", matrix_to_json(s.values)}};
          },
          [](const ConstantKernel &c) { return json{{"type", "constant"}, {"c", c.c}}; },
          [](const BipartiteKernel &b) { return json{{"type", "bipartite"}, {"r", b.r}}; },
          [](const ProductKernel &p) {
            return json{{"type", "product"},
                        {"boundaries", p.cells.boundaries()},
                        {"f", vector_to_json(p.f)}};
          },
          [](const DirectSumKernel &d) {
            json parts = json::array();
            for (const auto &p : d.parts) {
              parts.push_back({{"weight", p.weight}, {"kernel", kernel_to_json(*p.kernel)}});
            }
            return json{{"type", "direct_sum"}, {"parts", parts}};
          },
          [](const WattsStrogatzKernel &w) {
            return json{{"type", "ws_mix"}, {"p", w.p}, {"base", kernel_to_json(*w.base)}};
          },
      },
      k.variant());
}

InitialCondition make_initial(const json &spec) {
  const auto type = get<std::string>(spec, "type");
  if (type == "constant") return PiecewiseLinear::constant(get<double>(spec, "c"));
  if (type == "step") {
    return PiecewiseLinear::step(Partition(doubles(spec, "boundaries")),
                                 doubles(spec, "values"));
  }
  if (type == "piecewise_linear") {
    return PiecewiseLinear(Partition(doubles(spec, "boundaries")), doubles(spec, "left"),
                           doubles(spec, "right"));
  }
  if (type == "cells") {
    const auto v = doubles(spec, "values");
    if (v.empty()) throw ValidationError("cells initial condition needs values");
    return PiecewiseLinear::from_cells(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  }
  if (type == "zero_mean_two_block") {
    return zero_mean_two_block(get<double>(spec, "r"), get<double>(spec, "a"),
                               get<double>(spec, "b"));
  }
  throw ValidationError("unknown initial condition type '" + type + "'");
}

json initial_to_json(const InitialCondition &g) {
  if (g.is_step()) {
    return {{"type", "step"}, {"boundaries", g.pieces().boundaries()}, {"values", g.left()}};
  }
  return {{"type", "piecewise_linear"},
          {"boundaries", g.pieces().boundaries()},
          {"left", g.left()},
          {"right", g.right()}};
}

json graph_to_json(const WeightedGraph &g) {
  return {{"n", g.n()}, {"weights", matrix_to_json(g.weights())}};
}

WeightedGraph graph_from_json(const json &doc) {
  Eigen::MatrixXd w = square_matrix(field(doc, "weights"), "weights");
  if (doc.contains("n") && get<std::size_t>(doc, "n") != static_cast<std::size_t>(w.rows())) {
    throw ValidationError("graph 'n' does not match the weight matrix");
  }
  return WeightedGraph(std::move(w));
}

void write_edge_list_csv(std::ostream &os, const WeightedGraph &g) {
  if (!g.is_simple()) throw ValidationError("edge-list CSV is for simple graphs");
  os << "i,j,beta\n";
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = i + 1; j < g.n(); ++j) {
      if (g.weight(i, j) != 0.0) os << i << ',' << j << ",1\n";
    }
  }
}

WeightedGraph read_edge_list_csv(std::istream &is, std::size_t n) {
  if (n == 0) throw ValidationError("edge list needs n >= 1");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  std::string line;
  if (!std::getline(is, line) || line.rfind("i,j,beta", 0) != 0) {
    throw ValidationError("edge list must start with header i,j,beta");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t i = 0, j = 0;
    double beta = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> i >> c1 >> j >> c2 >> beta) || c1 != ',' || c2 != ',' || i >= n || j >= n) {
      throw ValidationError("malformed edge-list row '" + line + "'");
    }
    w(i, j) = w(j, i) = beta;
  }
  return WeightedGraph(std::move(w));
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream &os, const Trajectory &traj) {
  os << 't';
  for (std::size_t i = 0; i < traj.n(); ++i) os << ",cell_" << i;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_number(traj.times[k]);
    const auto s = traj.state(k);
    for (Eigen::Index i = 0; i < s.size(); ++i) os << ',' << format_number(s[i]);
    os << '\n';
  }
}

void write_error_table_csv(std::ostream &os, const ErrorTable &table) {
  os << "n,sup_l2_error,diameter_at_T,exceptional_measure\n";
  for (const auto &r : table.rows) {
    os << r.n << ',' << format_number(r.sup_l2_error) << ',' << format_number(r.diameter_at_T)
       << ',' << format_number(r.exceptional_measure) << '\n';
  }
}

void write_proximity_csv(std::ostream &os, const ProximityReport &report) {
  os << "n,max_exceptional_measure,max_diameter,below_threshold\n";
  for (const auto &r : report.rows) {
    os << r.n << ',' << format_number(r.max_exceptional_measure) << ','
       << format_number(r.max_diameter) << ',' << (r.below_threshold ? 1 : 0) << '\n';
  }
}

void write_mc_csv(std::ostream &os, const MonteCarloReport &report) {
  os << "n,trial,seed,diameter_at_T,exceptional_measure,success\n";
  for (const auto &t : report.trials) {
    os << t.n << ',' << t.trial << ',' << t.seed << ',' << format_number(t.diameter_at_T)
       << ',' << format_number(t.exceptional_measure) << ',' << (t.success ? 1 : 0) << '\n';
  }
}

void write_mc_diagnostics_csv(std::ostream &os, const MonteCarloReport &report) {
  os << "n,trial,exceedance,chebyshev_bound,binomial_se,randcond_literal,randcond_absolute\n";
  for (const auto &t : report.trials) {
    os << t.n << ',' << t.trial << ',' << format_number(t.exceedance) << ','
       << format_number(t.chebyshev_bound) << ',' << format_number(t.binomial_se) << ','
       << format_number(t.randcond_literal) << ',' << format_number(t.randcond_absolute)
       << '\n';
  }
}

json solver_options_to_json(const SolverOptions &o) {
  return {{"method", to_string(o.method)},
          {"rk_tol", o.rk_tol},
          {"rk_max_halvings", o.rk_max_halvings},
          {"rk_step_bound", o.rk_step_bound},
          {"n_max", o.n_max}};
}

SolverOptions solver_options_from_json(const json &doc) {
  SolverOptions o;
  o.method = solver_method_from_string(get_or<std::string>(doc, "method", "expm"));
  o.rk_tol = get_or(doc, "rk_tol", o.rk_tol);
  o.rk_max_halvings = get_or(doc, "rk_max_halvings", o.rk_max_halvings);
  o.rk_step_bound = get_or(doc, "rk_step_bound", o.rk_step_bound);
  o.n_max = get_or(doc, "n_max", o.n_max);
  if (!(o.rk_tol > 0.0) || !(o.rk_step_bound > 0.0) || o.rk_max_halvings < 1) {
    throw ValidationError("rk_tol, rk_step_bound and rk_max_halvings must be positive");
  }
  return o;
}

ExperimentConfig experiment_from_json(const json &doc) {
  if (!doc.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  cfg.kernel = make_kernel(field(doc, "kernel"));
  cfg.initial = make_initial(field(doc, "initial"));
  cfg.ladder = get<std::vector<std::size_t>>(doc, "ladder");
  cfg.horizon = get_or(doc, "T", cfg.horizon);
  cfg.dt = get_or(doc, "dt", cfg.dt);
  cfg.window = get_or(doc, "D", cfg.window);
  cfg.eps = get_or(doc, "eps", cfg.eps);
  cfg.c = get_or(doc, "c", cfg.c);
  cfg.trials = get_or(doc, "trials", cfg.trials);
  cfg.base_seed = get_or(doc, "seed", cfg.base_seed);
  cfg.reference_n = get_or(doc, "reference_n", cfg.reference_n);
  cfg.solver = solver_options_from_json(doc);
  validate(cfg);
  return cfg;
}

json experiment_to_json(const ExperimentConfig &cfg) {
  json doc = {{"kernel", kernel_to_json(cfg.kernel)},
              {"initial", initial_to_json(cfg.initial)},
              {"ladder", cfg.ladder},
              {"T", cfg.horizon},
              {"dt", cfg.dt},
              {"D", cfg.window},
              {"eps", cfg.eps},
              {"c", cfg.c},
              {"trials", cfg.trials},
              {"seed", cfg.base_seed},
              {"reference_n", resolved_reference_n(cfg)},
              {"threads", cfg.threads},
              {"rng", {{"algorithm", CounterRng::kAlgorithm}, {"version", CounterRng::kVersion}}}};
  doc.update(solver_options_to_json(cfg.solver));
  return doc;
}

json structure_report(const Kernel &k, const InitialCondition *g, double zero_tol,
                      double prop_tol) {
  const auto dec = connected_components(k, zero_tol);
  json comps = json::array();
  for (const auto &c : dec.components) {
    comps.push_back({{"interval", {c.lower, c.upper}},
                     {"weight", c.weight},
                     {"cells", c.cells},
                     {"null", c.null},
                     {"kernel", kernel_to_json(Kernel(c.kernel))}});
  }
  const auto twins = find_maximal_twin_sets(k, prop_tol);
  json sets = json::array();
  for (const auto &s : twins.sets) {
    sets.push_back({{"cells", s.cells},
                    {"multipliers", s.multipliers},
                    {"zero_rows", s.zero_rows},
                    {"measure", s.measure}});
  }
  json doc = {{"cells", dec.cells.boundaries()},
              {"connected", dec.components.size() == 1},
              {"components", comps},
              {"permutation", dec.permutation},
              {"twin_kernel", twins.is_twin_kernel()},
              {"twin_sets", sets},
              {"graphon", is_graphon(k)},
              {"zero_tol", zero_tol},
              {"prop_tol", prop_tol}};
  if (g != nullptr) {
    const auto nc = necessary_condition(k, *g, 1e-10, zero_tol);
    doc["necessary_condition"] = {{"satisfied", nc.satisfied},
                                  {"component_values", nc.component_values}};
    if (is_graphon(k)) doc["predicted_limit"] = initial_to_json(predict_limit(k, *g, zero_tol));
  }
  return doc;
}

}  // namespace voterlab
