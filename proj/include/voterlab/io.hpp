#ifndef VOTERLAB_IO_HPP
#define VOTERLAB_IO_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "voterlab/dynamics.hpp"
#include "voterlab/experiments.hpp"
#include "voterlab/graph.hpp"
#include "voterlab/kernel.hpp"
#include "voterlab/piecewise.hpp"
#include "voterlab/structure.hpp"

namespace voterlab {

using json = nlohmann::json;

/// Kernel from its JSON spec:
///   {"type":"step","boundaries":[...],"values":[[...]]}
///   {"type":"constant","c":...}
///   {"type":"bipartite","r":...}
///   {"type":"product","boundaries":[...],"f":[...]}
///   {"type":"direct_sum","parts":[{"weight":...,"kernel":{...}},...]}
///   {"type":"ws_mix","p":...,"base":{...}}
/// Throws ValidationError on unknown types, missing fields or bad parameters.
Kernel make_kernel(const json &spec);
json kernel_to_json(const Kernel &k);

/// Initial condition from JSON:
///   {"type":"constant","c":...}
///   {"type":"step","boundaries":[...],"values":[...]}
///   {"type":"piecewise_linear","boundaries":[...],"left":[...],"right":[...]}
///   {"type":"cells","values":[...]}            (uniform step function)
///   {"type":"zero_mean_two_block","r":...,"a":...,"b":...}
InitialCondition make_initial(const json &spec);
json initial_to_json(const InitialCondition &g);

/// {"n": N, "weights": [[...], ...]}
json graph_to_json(const WeightedGraph &g);
WeightedGraph graph_from_json(const json &doc);

/// "i,j,beta" rows (0-based, i<j) for the nonzero weights of a simple graph.
void write_edge_list_csv(std::ostream &os, const WeightedGraph &g);
WeightedGraph read_edge_list_csv(std::istream &is, std::size_t n);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

void write_trajectory_csv(std::ostream &os, const Trajectory &traj);
void write_error_table_csv(std::ostream &os, const ErrorTable &table);
void write_proximity_csv(std::ostream &os, const ProximityReport &report);
/// n,trial,seed,diameter_at_T,exceptional_measure,success
void write_mc_csv(std::ostream &os, const MonteCarloReport &report);
/// n,trial,exceedance,chebyshev_bound,binomial_se,randcond_literal,randcond_absolute
void write_mc_diagnostics_csv(std::ostream &os, const MonteCarloReport &report);

/// Fills an ExperimentConfig from JSON; absent keys keep their defaults.
ExperimentConfig experiment_from_json(const json &doc);
/// Every resolved field, for metadata sidecars.
json experiment_to_json(const ExperimentConfig &cfg);

json solver_options_to_json(const SolverOptions &o);
SolverOptions solver_options_from_json(const json &doc);

/// Components, twin-sets and (when g is given) the necessary-condition verdict.
json structure_report(const Kernel &k, const InitialCondition *g, double zero_tol,
                      double prop_tol);

}  // namespace voterlab

#endif  // VOTERLAB_IO_HPP
