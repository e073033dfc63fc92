#include "voterlab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "voterlab/errors.hpp"
#include "voterlab/io.hpp"
#include "voterlab/rng.hpp"

namespace voterlab {
namespace {

namespace fs = std::filesystem;

constexpr const char *kToolVersion = "1.0.0";

struct Invocation {
  std::string command;
  fs::path config_path;
  fs::path out_dir;
  unsigned threads = 1;
  json config;
};

json read_json_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path &path, const std::function<void(std::ostream &)> &fill) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  fill(os);
}

void write_json(const fs::path &path, const json &doc) {
  write_text(path, [&](std::ostream &os) { os << doc.dump(2) << '\n'; });
}

template <typename T>
T opt(const json &doc, const char *key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<double> time_grid(const json &cfg) {
  if (cfg.contains("times")) {
    auto t = opt<std::vector<double>>(cfg, "times", {});
    validate_times(t);
    return t;
  }
  if (!cfg.contains("T")) throw ValidationError("config needs 'T' (with optional 'dt') or 'times'");
  return uniform_times(opt<double>(cfg, "T", 0.0), opt<double>(cfg, "dt", 0.1));
}

json metadata(const Invocation &inv, json resolved, const std::vector<std::string> &outputs) {
  return {{"tool", "voterlab"},
          {"version", kToolVersion},
          {"command", inv.command},
          {"config_path", inv.config_path.string()},
          {"config", inv.config},
          {"resolved", std::move(resolved)},
          {"threads", inv.threads},
          {"rng", {{"algorithm", CounterRng::kAlgorithm}, {"version", CounterRng::kVersion}}},
          {"outputs", outputs}};
}

WeightedGraph graph_of(const json &cfg, const fs::path &config_dir, std::size_t n_max,
                       json &resolved) {
  if (cfg.contains("kernel")) {
    const Kernel k = make_kernel(cfg.at("kernel"));
    const auto n = opt<std::size_t>(cfg, "n", 0);
    if (n == 0) throw ValidationError("config with a kernel needs 'n' >= 1");
    resolved["kernel"] = kernel_to_json(k);
    resolved["n"] = n;
    return discretize_kernel(k, n, n_max);
  }
  if (cfg.contains("graph")) {
    resolved["graph_source"] = "inline";
    return graph_from_json(cfg.at("graph"));
  }
  if (cfg.contains("graph_file")) {
    fs::path p = opt<std::string>(cfg, "graph_file", "");
    if (p.is_relative()) p = config_dir / p;
    resolved["graph_source"] = p.string();
    return graph_from_json(read_json_file(p));
  }
  throw ValidationError("config needs one of 'kernel', 'graph' or 'graph_file'");
}

int cmd_simulate(const Invocation &inv) {
  const json &cfg = inv.config;
  const SolverOptions solver = solver_options_from_json(cfg);
  json resolved = solver_options_to_json(solver);
  const WeightedGraph g = graph_of(cfg, inv.config_path.parent_path(), solver.n_max, resolved);
  check_size(g.n(), solver.n_max);
  if (!cfg.contains("initial")) throw ValidationError("config needs 'initial'");
  const InitialCondition initial = make_initial(cfg.at("initial"));
  const auto times = time_grid(cfg);
  const double eps = opt(cfg, "eps", 1e-3);
  const double tail = opt(cfg, "tail_fraction", 0.2);
  const double limit_tol = opt(cfg, "limit_tol", 1e-8);
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");

  const Trajectory traj = solve_finite(g, average_initial(initial, g.n()), times, solver);

  double drift = 0.0;
  const double m0 = mean_value(traj.initial());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    drift = std::max(drift, std::abs(mean_value(traj.state(k)) - m0));
  }
  json summary = {{"n", g.n()},
                  {"final_time", times.back()},
                  {"final_diameter", consensus_diameter(traj.final_state())},
                  {"initial_mean", m0},
                  {"max_mean_drift", drift},
                  {"volterra_residual", volterra_residual(g, traj)},
                  {"solver", traj.solver}};
  const auto hit = detect_consensus(traj, eps);
  summary["consensus_time"] = hit ? json(*hit) : json(nullptr);
  if (traj.size() >= 10) {
    const auto lim = limit_state(traj, tail, limit_tol);
    summary["limit"] = {{"converged", lim.converged}, {"tail_oscillation", lim.tail_oscillation}};
  }
  if (traj.solver == "rk4") summary["rk_step"] = traj.rk_step;

  resolved["initial"] = initial_to_json(initial);
  resolved["times"] = {{"count", times.size()}, {"first", times.front()}, {"last", times.back()}};
  resolved["eps"] = eps;
  resolved["tail_fraction"] = tail;
  resolved["limit_tol"] = limit_tol;

  write_text(inv.out_dir / "trajectory.csv", [&](std::ostream &os) { write_trajectory_csv(os, traj); });
  write_json(inv.out_dir / "summary.json", summary);
  write_json(inv.out_dir / "metadata.json",
             metadata(inv, resolved, {"trajectory.csv", "summary.json", "metadata.json"}));
  return kExitOk;
}

int cmd_discretize(const Invocation &inv) {
  const json &cfg = inv.config;
  if (!cfg.contains("kernel")) throw ValidationError("config needs 'kernel'");
  const auto n_max = opt<std::size_t>(cfg, "n_max", kDefaultMaxVertices);
  json resolved = {{"n_max", n_max}};
  const WeightedGraph g = graph_of(cfg, inv.config_path.parent_path(), n_max, resolved);
  std::vector<std::string> outputs{"graph.json", "laplacian.json", "metadata.json"};
  write_json(inv.out_dir / "graph.json", graph_to_json(g));
  json lap = {{"n", g.n()}, {"scale", "D = (1/n)(B - diag(rowsum B))"}};
  const Eigen::MatrixXd d = laplacian(g);
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    rows.push_back(json::array());
    for (Eigen::Index j = 0; j < d.cols(); ++j) rows.back().push_back(d(i, j));
  }
  lap["matrix"] = rows;
  write_json(inv.out_dir / "laplacian.json", lap);
  if (g.is_simple()) {
    write_text(inv.out_dir / "edges.csv", [&](std::ostream &os) { write_edge_list_csv(os, g); });
    outputs.push_back("edges.csv");
  }
  write_json(inv.out_dir / "metadata.json", metadata(inv, resolved, outputs));
  return kExitOk;
}

int cmd_structure(const Invocation &inv) {
  const json &cfg = inv.config;
  if (!cfg.contains("kernel")) throw ValidationError("config needs 'kernel'");
  const Kernel k = make_kernel(cfg.at("kernel"));
  const double zero_tol = opt(cfg, "zero_tol", 0.0);
  const double prop_tol = opt(cfg, "prop_tol", 1e-10);
  std::optional<InitialCondition> g;
  if (cfg.contains("initial")) g = make_initial(cfg.at("initial"));
  const json report = structure_report(k, g ? &*g : nullptr, zero_tol, prop_tol);
  write_json(inv.out_dir / "structure.json", report);
  json resolved = {{"kernel", kernel_to_json(k)}, {"zero_tol", zero_tol}, {"prop_tol", prop_tol}};
  if (g) resolved["initial"] = initial_to_json(*g);
  write_json(inv.out_dir / "metadata.json",
             metadata(inv, resolved, {"structure.json", "metadata.json"}));
  return kExitOk;
}

ExperimentConfig experiment(const Invocation &inv) {
  ExperimentConfig cfg = experiment_from_json(inv.config);
  cfg.threads = inv.threads;
  return cfg;
}

int cmd_convergence(const Invocation &inv) {
  const ExperimentConfig cfg = experiment(inv);
  const std::size_t reference_n = resolved_reference_n(cfg);
  const ErrorTable table = convergence_study(cfg, reference_n);
  write_text(inv.out_dir / "error_table.csv",
             [&](std::ostream &os) { write_error_table_csv(os, table); });
  json resolved = experiment_to_json(cfg);
  resolved["reference"] = table.reference;
  write_json(inv.out_dir / "metadata.json",
             metadata(inv, resolved, {"error_table.csv", "metadata.json"}));
  return kExitOk;
}

int cmd_proximity(const Invocation &inv) {
  const ExperimentConfig cfg = experiment(inv);
  const ProximityReport report = consensus_proximity(cfg);
  write_text(inv.out_dir / "proximity.csv",
             [&](std::ostream &os) { write_proximity_csv(os, report); });
  json summary = {{"reference", report.reference},
                  {"consensus_reached", report.consensus_reached},
                  {"threshold_c_squared", report.threshold}};
  summary["consensus_time"] =
      report.consensus_reached ? json(report.consensus_time) : json(nullptr);
  if (!report.consensus_reached) {
    summary["note"] = "consensus-not-reached-in-horizon: reference diameter never fell to eps/3";
  }
  write_json(inv.out_dir / "proximity.json", summary);
  write_json(inv.out_dir / "metadata.json",
             metadata(inv, experiment_to_json(cfg),
                      {"proximity.csv", "proximity.json", "metadata.json"}));
  return kExitOk;
}

int cmd_mc_random(const Invocation &inv) {
  const ExperimentConfig cfg = experiment(inv);
  const MonteCarloReport report = random_consensus_mc(cfg);
  write_text(inv.out_dir / "mc.csv", [&](std::ostream &os) { write_mc_csv(os, report); });
  write_text(inv.out_dir / "mc_diagnostics.csv",
             [&](std::ostream &os) { write_mc_diagnostics_csv(os, report); });
  json summary = json::array();
  for (const auto &s : report.summary) {
    summary.push_back({{"n", s.n},
                       {"success_fraction", s.success_fraction},
                       {"mean_exceptional_measure", s.mean_exceptional_measure},
                       {"max_abs_randcond_literal", s.max_randcond_literal_abs},
                       {"min_randcond_absolute", s.min_randcond_absolute}});
  }
  write_json(inv.out_dir / "mc_summary.json",
             {{"per_n", summary},
              {"randcond_gate", "absolute"},
              {"randcond_note",
               "the literal integrand is antisymmetric against a symmetric weight and "
               "integrates to zero; the absolute-value variant is reported as the gate"}});
  json resolved = experiment_to_json(cfg);
  write_json(inv.out_dir / "metadata.json",
             metadata(inv, resolved,
                      {"mc.csv", "mc_diagnostics.csv", "mc_summary.json", "metadata.json"}));
  return kExitOk;
}

int exit_code_for(const Error &e) {
  if (dynamic_cast<const SizeLimitError *>(&e)) return kExitSizeLimit;
  if (dynamic_cast<const ConvergenceError *>(&e)) return kExitNonConvergence;
  if (dynamic_cast<const ValidationError *>(&e)) return kExitValidation;
  if (dynamic_cast<const UnsupportedError *>(&e)) return kExitValidation;
  return kExitFailure;
}

int report_error(const fs::path &out_dir, std::ostream &err, const std::string &kind,
                 const std::string &message, int code) {
  const json doc = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  err << doc.dump() << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream os(out_dir / "error.json");
      if (os) os << doc.dump(2) << '\n';
    }
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Voter-model laboratory on graphs and graph limits", "voterlab"};
  app.require_subcommand(1);
  const std::map<std::string, std::function<int(const Invocation &)>> commands = {
      {"simulate", cmd_simulate},     {"discretize", cmd_discretize},
      {"structure", cmd_structure},   {"convergence", cmd_convergence},
      {"proximity", cmd_proximity},   {"mc-random", cmd_mc_random},
  };
  Invocation inv;
  std::string config, out_dir;
  if (const char *env = std::getenv(kOutDirEnv)) out_dir = env;
  if (out_dir.empty()) out_dir = "out";
  for (const auto &[name, fn] : commands) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (default $VOTERLAB_OUT_DIR or ./out)");
    sub->add_option("--threads", inv.threads, "worker threads for experiments")
        ->check(CLI::PositiveNumber);
  }

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : report_error({}, err, "usage", e.what(), kExitValidation);
  }

  inv.command = app.get_subcommands().front()->get_name();
  inv.config_path = config;
  inv.out_dir = out_dir;
  try {
    inv.config = read_json_file(inv.config_path);
    if (!inv.config.is_object()) throw ValidationError("config must be a JSON object");
    fs::create_directories(inv.out_dir);
    const int code = commands.at(inv.command)(inv);
    out << "voterlab " << inv.command << ": wrote " << inv.out_dir.string() << '\n';
    return code;
  } catch (const Error &e) {
    return report_error(inv.out_dir, err, e.kind(), e.what(), exit_code_for(e));
  } catch (const fs::filesystem_error &e) {
    return report_error({}, err, "io", e.what(), kExitFailure);
  } catch (const std::exception &e) {
    return report_error(inv.out_dir, err, "internal", e.what(), kExitFailure);
  }
}

}  // namespace voterlab
