#include "hopfcoord/hopf_solver.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "hopfcoord/oracle.hpp"
#include "test_models.hpp"

namespace hopfcoord {
namespace {

using testing::interval_goal;
using testing::planar_ball_goal;
using testing::planar_rest_goal;
using testing::planar_vehicle;
using testing::random_vector;
using testing::toy_vehicle;
using testing::vec;

// Planar dynamics with a square control set.
VehicleModel sup_planar_vehicle() {
  const VehicleModel base = planar_vehicle();
  return VehicleModel(base.a(), base.b(), NormKind::kSup, "sup-planar");
}

HopfProblem toy_problem(double b, double c, double x, double t) {
  return HopfProblem{toy_vehicle(b), interval_goal(c, 1.0), vec({x}), t};
}

TEST(HopfObjective, Examples) {
  const HopfProblem problem = toy_problem(3.0, 3.0, 4.667, 0.222);
  EXPECT_NEAR(hopf_objective(problem, vec({0.0})).first, 1.0, 1e-15);
  // (3 (-1) + 1) + 0.222 * 3 - 4.667 (-1)
  EXPECT_NEAR(hopf_objective(problem, vec({-1.0})).first, -2.0 + 0.666 + 4.667, 1e-6);
  EXPECT_NEAR(hopf_objective(problem, vec({1.0})).first, 4.0 + 0.666 - 4.667, 1e-6);
  EXPECT_THROW(hopf_objective(problem, vec({1.5})), DomainViolation);
  EXPECT_THROW(hopf_objective(problem, vec({1.0, 0.0})), DimensionMismatch);

  const HopfProblem planar{planar_vehicle(), planar_rest_goal(1, 2), vec({3, -10, -1, 1}), 4.0};
  EXPECT_NEAR(hopf_objective(planar, Vector::Zero(4)).first, 0.5, 1e-15);
}

TEST(HopfObjective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(47);
  const std::vector<HopfProblem> problems = {
      toy_problem(3.0, 3.0, 4.667, 0.222), toy_problem(1.0, -3.0, 0.5, 2.0),
      HopfProblem{planar_vehicle(), planar_ball_goal(0, 5), vec({3, -10, -1, 1}), 15.0},
      HopfProblem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, -1, 1}), 15.0}};
  for (const auto& problem : problems) {
    const HopfObjective objective(problem);
    for (int k = 0; k < 100; ++k) {
      // Strictly interior so the central stencil stays feasible.
      Vector p = problem.region.project_dual(random_vector(rng, problem.x0.size()));
      p *= 0.9;
      const Vector g = objective.evaluate(p).gradient;
      const Vector fd = oracle::finite_difference_gradient(
          [&](const Vector& q) { return objective.evaluate(q).value; }, p);
      EXPECT_LE((g - fd).norm(), 1e-5 * g.norm()) << k;
    }
  }
}

TEST(SolveHopf, ToyExamples) {
  const HopfSolution at_arrival = solve_hopf(toy_problem(3.0, 3.0, 4.667, 0.222));
  EXPECT_TRUE(at_arrival.converged);
  // 0.222 rounds the arrival time 0.667 / 3 down; the exact value is 0.001.
  EXPECT_NEAR(at_arrival.value, oracle::analytic_value_1d(3.0, 3.0, 1.0, 4.667, 0.222), 1e-4);
  EXPECT_NEAR(solve_hopf(toy_problem(3.0, 3.0, 4.667, 1.667 / 3.0 - 1.0 / 3.0)).value, 0.0, 1e-4);
  EXPECT_DOUBLE_EQ(at_arrival.value, -at_arrival.objective_at_star);

  const HopfSolution v2g2 = solve_hopf(toy_problem(1.0, -3.0, 0.5, 1.0));
  EXPECT_TRUE(v2g2.converged);
  EXPECT_NEAR(v2g2.value, 1.5, 1e-4);

  const HopfSolution inside = solve_hopf(toy_problem(3.0, 3.0, 3.4, 0.0));
  EXPECT_TRUE(inside.converged);
  EXPECT_DOUBLE_EQ(inside.value, -0.6);
  EXPECT_EQ(inside.iterations, 0);
}

TEST(SolveHopf, MatchesAnalyticValueOnGrid) {
  for (auto [b, c] : {std::pair{3.0, 3.0}, std::pair{1.0, -3.0}}) {
    for (int a = 0; a < 10; ++a) {
      for (int k = 0; k < 10; ++k) {
        const double x = -8.0 + 16.0 * a / 9.0;
        const double t = 0.25 + 0.5 * k;
        const HopfSolution sol = solve_hopf(toy_problem(b, c, x, t));
        EXPECT_TRUE(sol.converged) << x << " " << t;
        EXPECT_NEAR(sol.value, oracle::analytic_value_1d(b, c, 1.0, x, t), 1e-4)
            << "b=" << b << " x=" << x << " t=" << t;
      }
    }
  }
}

TEST(SolveHopf, ConvergedImpliesProjectedGradientBelowTolerance) {
  const std::vector<HopfProblem> problems = {
      toy_problem(3.0, 3.0, 4.667, 2.0),
      HopfProblem{planar_vehicle(), planar_ball_goal(0, 5), vec({3, -10, -1, 1}), 15.0},
      HopfProblem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, -1, 1}), 15.0},
      HopfProblem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, -1, 1}), 30.0},
      HopfProblem{sup_planar_vehicle(), GoalRegion(vec({0, 5, 0, 0}), 0.5, NormKind::kSup),
                  vec({3, -10, -1, 1}), 8.0},
      HopfProblem{sup_planar_vehicle(), GoalRegion(vec({0, 5, 0, 0}), 0.5, NormKind::kSup),
                  vec({3, -10, -1, 1}), 20.0}};
  for (const auto& problem : problems) {
    const HopfSolution sol = solve_hopf(problem);
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(sol.projected_gradient_norm, problem.optimizer.grad_tol);
    EXPECT_LE(problem.region.dual_norm_of(sol.p_tilde_star), 1.0 + kConjugateDomainTolerance);
    EXPECT_GE(sol.certificate_gap, -1e-12);
    EXPECT_LE(sol.certificate_gap, 1e-6);
  }
}

// Weak duality: phi = -min f >= -f(q) for every feasible q.
TEST(SolveHopf, CertificateAgainstRandomProbes) {
  std::mt19937_64 rng(53);
  const std::vector<HopfProblem> problems = {
      toy_problem(3.0, 3.0, 4.667, 0.222), toy_problem(1.0, 3.0, 0.5, 1.0),
      HopfProblem{planar_vehicle(), planar_rest_goal(-5, 0), vec({-3, 1, -1, 1}), 8.0},
      HopfProblem{planar_vehicle(), planar_ball_goal(5, 0), vec({6, -13, 1, 1}), 12.0}};
  for (const auto& problem : problems) {
    const HopfSolution sol = solve_hopf(problem);
    const HopfObjective objective(problem);
    for (int k = 0; k < 100; ++k) {
      const Vector q = problem.region.project_dual(random_vector(rng, problem.x0.size(), 0.7));
      EXPECT_GE(sol.value, -objective.evaluate(q).value - 1e-12);
    }
  }
}

TEST(SolveHopf, ValueIndependentOfStart) {
  std::mt19937_64 rng(59);
  const std::vector<HopfProblem> problems = {
      toy_problem(3.0, 3.0, 4.667, 1.0),
      HopfProblem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, -1, 1}), 15.0},
      HopfProblem{planar_vehicle(), planar_ball_goal(-5, 0), vec({-3, 1, -1, 1}), 2.0}};
  for (const auto& problem : problems) {
    const double reference = solve_hopf(problem).value;
    for (int k = 0; k < 5; ++k) {
      const Vector start = random_vector(rng, problem.x0.size(), 2.0);
      const HopfSolution sol = solve_hopf(problem, start);
      EXPECT_TRUE(sol.converged);
      EXPECT_NEAR(sol.value, reference, 1e-6);
    }
  }
}

// Holds whenever x0 is an equilibrium of the drift: waiting at x0 and then
// following the shorter horizon's control is admissible. Moving starts can
// violate it (drift may carry the vehicle away before braking takes hold).
TEST(SolveHopf, NonincreasingInHorizonFromRest) {
  const std::vector<std::pair<HopfProblem, double>> cases = {
      {toy_problem(3.0, -3.0, 4.667, 0.0), 4.0},
      {toy_problem(1.0, 3.0, 0.5, 0.0), 4.0},
      {HopfProblem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, 0, 0}), 0.0}, 25.0},
      {HopfProblem{planar_vehicle(), planar_ball_goal(5, 0), vec({-3, 1, 0, 0}), 0.0}, 25.0}};
  for (auto [problem, horizon] : cases) {
    double previous = INFINITY;
    std::optional<Vector> warm;
    for (int k = 0; k <= 20; ++k) {
      problem.horizon = horizon * k / 20.0;
      const HopfSolution sol = solve_hopf(problem, warm);
      warm = sol.p_tilde_star;
      EXPECT_LE(sol.value, previous + 1e-6) << problem.horizon;
      previous = sol.value;
    }
  }
}

TEST(SolveHopf, MovingStartCanLoseValueEarly) {
  // Heading away from the goal at unit speed: the distance grows before the
  // damped vehicle can turn around.
  HopfProblem problem{planar_vehicle(), planar_ball_goal(5, 0), vec({-3, 1, -1, 1}), 0.0};
  const double at_start = solve_hopf(problem).value;
  problem.horizon = 1.25;
  EXPECT_GT(solve_hopf(problem).value, at_start + 0.1);
}

TEST(SolveHopf, ZeroHorizonReturnsImplicitValue) {
  const HopfProblem problem{planar_vehicle(), planar_rest_goal(0, 5), vec({0.1, 5, 0, 0}), 0.0};
  const HopfSolution sol = solve_hopf(problem);
  EXPECT_DOUBLE_EQ(sol.value, problem.region.eval_implicit(problem.x0));
  EXPECT_LE(sol.value, 0.0);
}

TEST(SolveHopf, ReportsNonConvergence) {
  HopfProblem problem{planar_vehicle(), planar_rest_goal(0, 5), vec({3, -10, -1, 1}), 15.0};
  problem.optimizer.max_iters = 2;
  const HopfSolution sol = solve_hopf(problem);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
}

TEST(SolveHopf, RejectsInvalidProblems) {
  EXPECT_THROW(solve_hopf(toy_problem(3.0, 3.0, 1.0, -1.0)), InvalidArgument);
  EXPECT_THROW(solve_hopf(HopfProblem{planar_vehicle(), interval_goal(0, 1), vec({0, 0, 0, 0}), 1.0}),
               DimensionMismatch);
  HopfProblem bad = toy_problem(3.0, 3.0, 1.0, 1.0);
  bad.smoothing.mu = 0.0;
  EXPECT_THROW(solve_hopf(bad), InvalidArgument);
}

}  // namespace
}  // namespace hopfcoord
