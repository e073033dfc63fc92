#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "voterlab/dynamics.hpp"
#include "voterlab/errors.hpp"
#include "voterlab/graph.hpp"
#include "voterlab/kernel.hpp"

using namespace voterlab;

namespace {

WeightedGraph complete(std::size_t n, double w) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n, n, w);
  b.diagonal().setZero();
  return WeightedGraph(b);
}

Kernel random_step_kernel(std::mt19937_64 &rng, bool nonnegative) {
  const auto s = oracle::random_step(rng, 6, nonnegative);
  return step_kernel(Partition(s.boundaries), s.values);
}

InitialCondition random_initial(std::mt19937_64 &rng) {
  const auto s = oracle::random_step(rng, 5, false);
  std::vector<double> v(s.values.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3.0 * s.values(i, 0);
  return InitialCondition::step(Partition(s.boundaries), v);
}

InitialCondition tent() {
  return InitialCondition(Partition({0.0, 0.5, 1.0}), {-1.0, 1.0}, {1.0, -1.0});
}

Kernel four_cycle() {
  Eigen::MatrixXd b(4, 4);
  b << 0, 1, -1, 0, 1, 0, 0, -1, -1, 0, 0, 1, 0, -1, 1, 0;
  return pixel_kernel(WeightedGraph(b));
}

}  // namespace

TEST(Dynamics, UniformTimesAndValidation) {
  const auto t = uniform_times(1.0, 0.3);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t[3], 0.9);
  EXPECT_DOUBLE_EQ(t.back(), 1.0);
  EXPECT_EQ(uniform_times(1.0, 0.25).size(), 5u);
  EXPECT_THROW(uniform_times(1.0, 0.0), ValidationError);
  EXPECT_THROW(validate_times({0.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(validate_times({0.5, 1.0}), ValidationError);
  EXPECT_THROW(validate_times({}), ValidationError);
  EXPECT_NO_THROW(validate_times({0.0}));
}

TEST(Dynamics, SolverNames) {
  EXPECT_EQ(solver_method_from_string("rk"), SolverMethod::rk4);
  EXPECT_EQ(solver_method_from_string("expm"), SolverMethod::expm);
  EXPECT_STREQ(to_string(SolverMethod::rk4), "rk4");
  EXPECT_THROW(solver_method_from_string("euler"), ValidationError);
}

TEST(Dynamics, AverageInitialExamples) {
  const StateVector c = average_initial(InitialCondition::constant(0.7), 9);
  EXPECT_NEAR((c.array() - 0.7).abs().maxCoeff(), 0.0, 1e-15);
  const auto g = InitialCondition::step(Partition({0.0, 0.5, 1.0}), {-1.0, 1.0});
  const StateVector two = average_initial(g, 2);
  EXPECT_NEAR(two[0], -1.0, 1e-15);
  EXPECT_NEAR(two[1], 1.0, 1e-15);
  const StateVector three = average_initial(g, 3);
  EXPECT_NEAR(three[0], -1.0, 1e-15);
  EXPECT_NEAR(three[1], 0.0, 1e-15);
  EXPECT_NEAR(three[2], 1.0, 1e-15);
}

TEST(Dynamics, SolveFiniteExamples) {
  const std::vector<double> times{0.0, 0.5, 1.0};
  for (SolverMethod m : {SolverMethod::expm, SolverMethod::rk4}) {
    SolverOptions o;
    o.method = m;
    const Trajectory tr = solve_finite(complete(2, 1.0), Eigen::Vector2d(1, -1), times, o);
    EXPECT_NEAR(tr.final_state()[0], std::exp(-1.0), 1e-9);
    EXPECT_NEAR(tr.final_state()[1], -std::exp(-1.0), 1e-9);
    EXPECT_NEAR(consensus_diameter(tr.state(1)), 2.0 * std::exp(-0.5), 1e-9);
    EXPECT_EQ(tr.solver, to_string(m));

    const Eigen::Vector3d u0(0.3, -2.0, 5.0);
    const Trajectory z =
        solve_finite(WeightedGraph(Eigen::MatrixXd::Zero(3, 3)), u0, times, o);
    for (std::size_t k = 0; k < z.size(); ++k) EXPECT_EQ(z.state(k), u0);

    const Trajectory rep = solve_finite(complete(5, -1.0), Eigen::VectorXd::Constant(5, 0.4),
                                        times, o);
    EXPECT_NEAR((rep.final_state().array() - 0.4).abs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(Dynamics, SolveFiniteRejectsBadInput) {
  EXPECT_THROW(solve_finite(complete(3, 1.0), Eigen::Vector2d(1, 2), {0.0, 1.0}),
               ValidationError);
  EXPECT_THROW(solve_finite(complete(2, 1.0), Eigen::Vector2d(1, std::nan("")), {0.0, 1.0}),
               ValidationError);
  SolverOptions tiny;
  tiny.method = SolverMethod::rk4;
  tiny.rk_tol = 1e-300;
  tiny.rk_max_halvings = 1;
  EXPECT_THROW(solve_finite(complete(4, 1.0), Eigen::Vector4d(1, -1, 2, 0), {0.0, 3.0}, tiny),
               ConvergenceError);
  SolverOptions small;
  small.n_max = 3;
  EXPECT_THROW(solve_continuum(constant_kernel(1.0), InitialCondition::constant(1.0), 4,
                               {0.0, 1.0}, small),
               SizeLimitError);
}

TEST(Dynamics, ExpmMatchesTaylorOracle) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Kernel k = random_step_kernel(rng, rep % 2 == 0);
    const std::size_t n = 3 + rep;
    const WeightedGraph g = discretize_kernel(k, n);
    const StateVector u0 = Eigen::VectorXd::Random(n);
    const Trajectory tr = solve_finite(g, u0, {0.0, 0.7, 3.0});
    const Eigen::MatrixXd d = laplacian(g);
    EXPECT_NEAR((tr.state(1) - oracle::expm_taylor(d, 0.7) * u0).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    EXPECT_NEAR((tr.state(2) - oracle::expm_taylor(d, 3.0) * u0).cwiseAbs().maxCoeff(), 0.0, 1e-11);
  }
}

TEST(DynamicsProperties, ExpmAndRkAgree) {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const Kernel k = random_step_kernel(rng, false);
    const InitialCondition g = random_initial(rng);
    const std::size_t n = 8 + 6 * rep;
    const auto times = uniform_times(5.0, 0.5);
    SolverOptions rk;
    rk.method = SolverMethod::rk4;
    const Trajectory a = solve_continuum(k, g, n, times);
    const Trajectory b = solve_continuum(k, g, n, times, rk);
    EXPECT_NEAR((a.states - b.states).cwiseAbs().maxCoeff(), 0.0, 1e-7);
    EXPECT_GT(b.rk_step, 0.0);
  }
}

TEST(DynamicsProperties, ConservationAndBoundedness) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const bool graphon = rep % 2 == 0;
    const Kernel k = random_step_kernel(rng, graphon);
    const InitialCondition g = random_initial(rng);
    const Trajectory tr = solve_continuum(k, g, 16 + 3 * rep, uniform_times(10.0, 0.25));
    const double m0 = mean_value(tr.initial());
    const double sup0 = tr.initial().cwiseAbs().maxCoeff();
    for (std::size_t t = 0; t < tr.size(); ++t) {
      EXPECT_NEAR(mean_value(tr.state(t)), m0, 1e-10);
      if (graphon) EXPECT_LE(tr.state(t).cwiseAbs().maxCoeff(), sup0 + 1e-9);
    }
    EXPECT_NEAR(m0, g.integral(), 1e-12);
  }
}

TEST(Dynamics, SolveContinuumExamples) {
  const InitialCondition g = tent();
  const Trajectory zero = solve_continuum(constant_kernel(0.0), g, 10, {0.0, 1.0, 5.0});
  for (std::size_t k = 0; k < zero.size(); ++k) {
    EXPECT_EQ(zero.state(k), average_initial(g, 10));
  }

  const auto g2 = InitialCondition::step(Partition({0.0, 0.2, 1.0}), {2.0, -1.0});
  const Trajectory c = solve_continuum(constant_kernel(1.0), g2, 20, {0.0, 40.0});
  EXPECT_NEAR((c.final_state().array() - g2.integral()).abs().maxCoeff(), 0.0, 1e-12);
  EXPECT_EQ(c.source, "continuum n-th approximation");
}

TEST(Dynamics, ClosedFormExamples) {
  const double r = 1.0 / 3.0;
  const InitialCondition g = zero_mean_two_block(r, 0.8, -0.5);
  EXPECT_TRUE(in_zero_mean_family(r, g));
  for (double t : {0.0, 0.4, 3.0}) {
    EXPECT_NEAR(closed_form_bipartite(r, g, 0.5, t), g(0.5) * std::exp(-t), 1e-15);
    EXPECT_NEAR(closed_form_bipartite(r, g, 0.2, t), g(0.2) * std::exp(-t / 3.0), 1e-15);
  }
  for (double x : {0.0, 0.1, 0.3, 0.7, 1.0}) {
    EXPECT_EQ(closed_form_bipartite(r, g, x, 0.0), g(x));
  }
  EXPECT_THROW(closed_form_bipartite(r, InitialCondition::constant(1.0), 0.5, 1.0),
               ValidationError);
  EXPECT_THROW(closed_form_bipartite(0.6, g, 0.5, 1.0), ValidationError);
  const PiecewiseLinear prof = closed_form_bipartite_profile(r, g, 2.0);
  for (double x : {0.05, 0.25, 0.4, 0.9}) {
    EXPECT_NEAR(prof(x), closed_form_bipartite(r, g, x, 2.0), 1e-15);
  }
}

TEST(DynamicsProperties, ClosedFormAgreementImprovesWithN) {
  const double r = 1.0 / 3.0;
  const InitialCondition g = zero_mean_two_block(r, 1.0, 0.5);
  double prev = INFINITY;
  for (std::size_t n : {12u, 24u, 48u, 96u}) {
    const Trajectory tr = solve_continuum(bipartite_kernel(r), g, n, {0.0, 2.0});
    const double err = l2_distance(PiecewiseLinear::from_cells(tr.final_state()),
                                   closed_form_bipartite_profile(r, g, 2.0));
    // n divisible by 12 aligns every jump of g and the kernel with the grid
    EXPECT_LT(err, 1e-12) << n;
    prev = std::min(prev, err);
  }
  const InitialCondition odd = zero_mean_two_block(0.3, 1.0, 0.5);
  double last = INFINITY;
  for (std::size_t n : {8u, 16u, 32u, 64u, 128u}) {
    const Trajectory tr = solve_continuum(bipartite_kernel(0.3), odd, n, {0.0, 2.0});
    const double err = l2_distance(PiecewiseLinear::from_cells(tr.final_state()),
                                   closed_form_bipartite_profile(0.3, odd, 2.0));
    EXPECT_LT(err, last) << n;
    last = err;
  }
}

TEST(DynamicsProperties, SmallWorldsRelation) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 5; ++rep) {
    const Kernel base = random_step_kernel(rng, true);
    const double p = 0.1 * (rep + 1) - 0.05;
    const InitialCondition g = zero_mean_two_block(0.25, 1.0, -0.7);
    const auto times = uniform_times(4.0, 0.5);
    const std::size_t n = 40;
    const Trajectory ws = solve_continuum(watts_strogatz_mix(base, p), g, n, times);
    const Trajectory v = solve_continuum(scaled(base, 1.0 - 2.0 * p), g, n, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      EXPECT_NEAR((ws.state(k) - std::exp(-p * times[k]) * v.state(k)).cwiseAbs().maxCoeff(), 0.0,
                  1e-7);
    }
  }
}

TEST(Dynamics, DiameterAndMean) {
  EXPECT_EQ(consensus_diameter(Eigen::VectorXd::Constant(4, 2.5)), 0.0);
  EXPECT_EQ(consensus_diameter(Eigen::Vector2d(1, -1)), 2.0);
  EXPECT_EQ(mean_value(Eigen::Vector2d(1, -1)), 0.0);
  EXPECT_EQ(mean_value(Eigen::VectorXd::Constant(3, -0.25)), -0.25);
}

TEST(Dynamics, ExceptionalMeasureExamples) {
  EXPECT_EQ(exceptional_measure(Eigen::VectorXd::Constant(5, 1.0), 1e-6), 0.0);
  EXPECT_EQ(exceptional_measure(Eigen::Vector4d(0, 0, 0, 10), 1.0), 0.25);
  EXPECT_EQ(exceptional_measure(Eigen::Vector4d(0, 0.5, 1.0, 1.6), 1.0), 0.25);
}

TEST(DynamicsProperties, ExceptionalMeasureMatchesBruteForce) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 12);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = size(rng);
    std::vector<double> v(n);
    // quantized values exercise ties and exact-width windows
    for (double &x : v) x = std::round(8.0 * u(rng)) / 8.0;
    const double eps = std::round(8.0 * std::abs(u(rng))) / 8.0 + 1e-9;
    const Eigen::Map<const Eigen::VectorXd> s(v.data(), n);
    EXPECT_DOUBLE_EQ(exceptional_measure(s, eps), oracle::exceptional_measure_bruteforce(v, eps));
  }
}

TEST(Dynamics, VolterraResidualExamples) {
  const InitialCondition g = tent();
  const auto times = uniform_times(2.0, 0.1);
  const Trajectory zero = solve_continuum(constant_kernel(0.0), g, 16, times);
  EXPECT_EQ(volterra_residual(constant_kernel(0.0), zero), 0.0);
  const Trajectory flat = solve_continuum(constant_kernel(1.0), InitialCondition::constant(0.3),
                                          16, times);
  EXPECT_LE(volterra_residual(constant_kernel(1.0), flat), 1e-12);

  const double r = 1.0 / 3.0;
  const InitialCondition h = zero_mean_two_block(r, 1.0, 0.5);
  const Trajectory coarse = solve_continuum(bipartite_kernel(r), h, 64, uniform_times(2.0, 0.01));
  const Trajectory fine = solve_continuum(bipartite_kernel(r), h, 64, uniform_times(2.0, 0.005));
  const double rc = volterra_residual(bipartite_kernel(r), coarse);
  const double rf = volterra_residual(bipartite_kernel(r), fine);
  EXPECT_LE(rc, 1e-4);
  EXPECT_GT(rc / rf, 3.5);
  EXPECT_LT(rc / rf, 4.5);
  // graph form agrees with kernel form on the discretized operator
  EXPECT_NEAR(volterra_residual(discretize_kernel(bipartite_kernel(r), 64), coarse), rc, 1e-12);
}

TEST(Dynamics, VolterraResidualDetectsWrongTrajectory) {
  const auto times = uniform_times(1.0, 0.01);
  Trajectory tr = solve_finite(complete(2, 1.0), Eigen::Vector2d(1, -1), times);
  tr.states(0, 50) += 0.01;
  EXPECT_GT(volterra_residual(complete(2, 1.0), tr), 5e-3);
}

TEST(Dynamics, DetectConsensusExamples) {
  const auto times = uniform_times(10.0, 0.01);
  const Trajectory flat =
      solve_finite(complete(3, 1.0), Eigen::VectorXd::Constant(3, 2.0), times);
  EXPECT_EQ(detect_consensus(flat, 1e-3), 0.0);

  const Trajectory two = solve_finite(complete(2, 1.0), Eigen::Vector2d(1, -1), times);
  const auto hit = detect_consensus(two, 2e-3);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(*hit, std::log(1000.0), 0.01);
  EXPECT_GE(*hit, std::log(1000.0));

  const Trajectory cyc = solve_continuum(four_cycle(), tent(), 8, uniform_times(20.0, 0.5));
  EXPECT_FALSE(detect_consensus(cyc, 1.0).has_value());
  EXPECT_LE((cyc.states.colwise() - cyc.initial()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Dynamics, DetectConsensusRequiresStayingBelow) {
  Trajectory tr;
  tr.times = {0.0, 1.0, 2.0, 3.0};
  tr.states.resize(2, 4);
  tr.states << 1, 0, 1, 0,
               0, 0, 0, 0;
  EXPECT_EQ(detect_consensus(tr, 0.5), 3.0);
  tr.states(0, 3) = 1.0;
  EXPECT_FALSE(detect_consensus(tr, 0.5).has_value());
}

TEST(Dynamics, LimitStateExamples) {
  const InitialCondition g = tent();
  const auto times = uniform_times(20.0, 0.5);
  const LimitEstimate z = limit_state(solve_continuum(constant_kernel(0.0), g, 12, times), 0.2);
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.state, average_initial(g, 12));

  const auto g2 = InitialCondition::step(Partition({0.0, 0.7, 1.0}), {1.0, -2.0});
  const LimitEstimate c = limit_state(
      solve_continuum(constant_kernel(1.0), g2, 10, uniform_times(40.0, 1.0)), 0.2);
  EXPECT_TRUE(c.converged);
  EXPECT_NEAR((c.state.array() - g2.integral()).abs().maxCoeff(), 0.0, 1e-6);

  const LimitEstimate rep = limit_state(
      solve_finite(complete(4, -1.0), Eigen::Vector4d(1, 0, 0, -1), uniform_times(2.0, 0.1)), 0.3);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.tail_oscillation, 1.0);

  EXPECT_THROW(limit_state(solve_finite(complete(2, 1.0), Eigen::Vector2d(1, 0), {0.0, 1.0}), 0.5),
               ValidationError);
  EXPECT_THROW(limit_state(solve_continuum(constant_kernel(0.0), g, 4, times), 1.0),
               ValidationError);
}
