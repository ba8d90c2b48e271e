#include "hopfcoord/coordinator.hpp"

#include <cmath>
#include <map>

#include "gtest/gtest.h"
#include "hopfcoord/oracle.hpp"
#include "test_problems.hpp"

namespace hopfcoord {
namespace {

using testing::planar4_coordination;
using testing::toy_coordination;
using testing::vec;

// phi_{ij} of the toy problem in closed form.
Matrix toy_analytic_values(double x1, double x2, double t) {
  const double gains[2] = {3.0, 1.0};
  const double starts[2] = {x1, x2};
  const double centers[2] = {3.0, -3.0};
  Matrix q(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      q(i, j) = oracle::analytic_value_1d(gains[i], centers[j], 1.0, starts[i], t);
  return q;
}

TEST(JointValue, ToyMatchesAnalyticEntriesAndBruteForce) {
  const CoordinationProblem problem = toy_coordination();
  for (double t : {0.0, 0.25, 1.0, 2.0, 2.222, 3.0}) {
    const JointValue value = joint_value(problem, t);
    const Matrix expected = toy_analytic_values(4.667, 0.5, t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(value.values(i, j), expected(i, j), 1e-4) << t;
    EXPECT_DOUBLE_EQ(value.phi, brute_force_lbap(value.values).bottleneck_value);
  }
}

TEST(JointValue, ToyExamples) {
  const CoordinationProblem problem = toy_coordination();
  // Identity: max(-1, 1.5) = 1.5; swap: max(3.667, 0.5) = 3.667.
  const JointValue at_one = joint_value(problem, 1.0);
  EXPECT_NEAR(at_one.phi, 1.5, 1e-4);
  EXPECT_EQ(at_one.assignment.sigma, (std::vector<int>{0, 1}));

  const JointValue at_arrival = joint_value(problem, 2.222);
  EXPECT_NEAR(at_arrival.phi, 0.0, 2e-3);
  EXPECT_EQ(at_arrival.assignment.sigma, (std::vector<int>{1, 0}));
}

TEST(JointValue, InsideDistinctGoalsAtZero) {
  const CoordinationProblem problem = toy_coordination(-3.5, 2.5);
  const JointValue value = joint_value(problem, 0.0);
  EXPECT_LE(value.phi, 0.0);
  EXPECT_EQ(value.assignment.sigma, (std::vector<int>{1, 0}));
}

TEST(JointValue, CountsExactlyNSquaredSolves) {
  EXPECT_EQ(joint_value(toy_coordination(), 1.0).hopf_solves, 4);
  EXPECT_EQ(joint_value(toy_coordination(), 0.0).hopf_solves, 4);
  EXPECT_EQ(joint_value(planar4_coordination(), 5.0).hopf_solves, 16);
}

TEST(JointValue, DeterministicAcrossThreadCounts) {
  CoordinationProblem problem = planar4_coordination();
  problem.settings.threads = 1;
  const JointValue serial = joint_value(problem, 12.0);
  problem.settings.threads = 4;
  const JointValue parallel = joint_value(problem, 12.0);
  EXPECT_EQ(serial.values.values(), parallel.values.values());
  EXPECT_EQ(serial.assignment.sigma, parallel.assignment.sigma);
}

TEST(JointValue, NonConvergedPairIsNamed) {
  CoordinationProblem problem = toy_coordination();
  problem.settings.optimizer.max_iters = 1;
  try {
    joint_value(problem, 1.0);
    FAIL() << "expected SolverFailure";
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.vehicle(), 0);
    EXPECT_EQ(e.goal(), 0);
  }
}

TEST(JointValue, RejectsInvalidInput) {
  EXPECT_THROW(joint_value(toy_coordination(), -1.0), InvalidArgument);
  CoordinationProblem problem = toy_coordination();
  problem.initial_states.pop_back();
  EXPECT_THROW(joint_value(problem, 1.0), InvalidArgument);
  problem = toy_coordination();
  problem.settings.epsilon = 0.0;
  EXPECT_THROW(joint_value(problem, 1.0), InvalidArgument);
}

TEST(IsReachable, ToyExamples) {
  EXPECT_TRUE(is_reachable(toy_coordination(), 2.5));
  EXPECT_FALSE(is_reachable(toy_coordination(), 1.0));
  EXPECT_TRUE(is_reachable(toy_coordination(-3.5, 2.5), 0.0));
}

TEST(MinTimeToReach, Toy) {
  const CoordinationProblem problem = toy_coordination();
  const CoordinationResult result = min_time_to_reach(problem);
  EXPECT_NEAR(result.t_star, 2.222, 1e-2);
  EXPECT_NEAR(result.t_star, oracle::analytic_min_time_1d(3.0, -3.0, 1.0, 4.667), 1e-4);
  EXPECT_EQ(result.sigma_star, (std::vector<int>{1, 0}));
  EXPECT_LE(std::abs(result.phi_at_t_star), problem.settings.epsilon);
  EXPECT_EQ(result.hopf_solves, 4 * (result.newton_iterations + 1));
  EXPECT_EQ(static_cast<int>(result.history.size()), result.newton_iterations);
  ASSERT_EQ(result.p_tilde_star.size(), 2u);
}

TEST(MinTimeToReach, StartInsideGoalsNeedsNoIterations) {
  const CoordinationResult result = min_time_to_reach(toy_coordination(-3.5, 2.5));
  EXPECT_EQ(result.t_star, 0.0);
  EXPECT_EQ(result.newton_iterations, 0);
  EXPECT_LE(result.phi_at_t_star, 0.0);
  EXPECT_EQ(result.sigma_star, (std::vector<int>{1, 0}));
}

TEST(MinTimeToReach, Algorithm1DerivativeConvergesToSameTime) {
  CoordinationProblem problem = toy_coordination();
  const double reference = min_time_to_reach(problem).t_star;
  problem.settings.newton_derivative = NewtonDerivative::kAlgorithm1;
  const CoordinationResult result = min_time_to_reach(problem);
  EXPECT_NEAR(result.t_star, reference, 1e-4);
  EXPECT_EQ(result.sigma_star, (std::vector<int>{1, 0}));
}

TEST(MinTimeToReach, UnreachableWithinTMax) {
  CoordinationProblem problem = toy_coordination();
  problem.settings.t_max = 1.5;
  EXPECT_THROW(min_time_to_reach(problem), UnreachableFormation);
}

TEST(MinTimeToReach, IterationLimitCarriesHistory) {
  CoordinationProblem problem = toy_coordination();
  problem.settings.max_newton_iters = 1;
  try {
    min_time_to_reach(problem);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_NE(std::string(e.what()).find("t = 1.000000"), std::string::npos) << e.what();
  }
}

// Each iterate lies inside the bracket known before it, and the bracket ends
// keep their signs.
void expect_bracket_preserved(const CoordinationResult& result) {
  double lo = 0.0;
  double hi = INFINITY;
  std::map<double, double> seen;
  for (const auto& rec : result.history) {
    EXPECT_GE(rec.t, lo);
    EXPECT_LE(rec.t, hi);
    seen[rec.t] = rec.phi;
    lo = rec.bracket_lo;
    hi = rec.bracket_hi;
    EXPECT_LT(lo, hi);
    if (lo > 0.0) {
      EXPECT_GT(seen.at(lo), 0.0);
    }
    if (std::isfinite(hi)) {
      EXPECT_LE(seen.at(hi), 0.0);
    }
  }
}

TEST(MinTimeToReach, BracketPreservedFromFarStart) {
  CoordinationProblem problem = toy_coordination();
  problem.settings.t0 = 40.0;
  const CoordinationResult result = min_time_to_reach(problem);
  EXPECT_NEAR(result.t_star, 2.2223, 1e-3);
  expect_bracket_preserved(result);
}

TEST(MinTimeToReach, DerivativeIdentityAtToySolution) {
  const CoordinationProblem problem = toy_coordination();
  const CoordinationResult result = min_time_to_reach(problem);
  const double h = 1e-4;
  const double fd = (joint_value(problem, result.t_star + h).phi -
                     joint_value(problem, result.t_star - h).phi) / (2 * h);
  const double hamiltonian = newton_hamiltonian(problem, result.final_value);
  EXPECT_LE(std::abs(fd + hamiltonian), 1e-2 * std::abs(hamiltonian));
  EXPECT_NEAR(hamiltonian, 3.0, 1e-6);
}

TEST(MinTimeToReach, ResultRecomputesFromStoredValues) {
  const CoordinationResult result = min_time_to_reach(toy_coordination());
  double worst = -INFINITY;
  for (int i = 0; i < 2; ++i) worst = std::max(worst, result.per_pair_values(i, result.sigma_star[i]));
  EXPECT_EQ(worst, result.phi_at_t_star);
}

TEST(MinTimeToReach, AssignmentStableNearToySolution) {
  const CoordinationProblem problem = toy_coordination();
  EXPECT_TRUE(assignment_stable_near(problem, min_time_to_reach(problem)));
}

TEST(MinTimeToReach, LogsAssignmentSwitches) {
  // From t0 = 1 the identity is best; the swap wins near t*.
  const CoordinationResult result = min_time_to_reach(toy_coordination());
  ASSERT_FALSE(result.history.empty());
  EXPECT_EQ(result.history.front().sigma, (std::vector<int>{0, 1}));
  bool switched = false;
  for (const auto& rec : result.history) switched = switched || rec.assignment_switched;
  EXPECT_TRUE(switched);
}

// The planar problem takes about a second; its invariants are checked on one
// solve.
class Planar4 : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    problem_ = new CoordinationProblem(planar4_coordination());
    result_ = new CoordinationResult(min_time_to_reach(*problem_));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete problem_;
  }
  static CoordinationProblem* problem_;
  static CoordinationResult* result_;
};
CoordinationProblem* Planar4::problem_ = nullptr;
CoordinationResult* Planar4::result_ = nullptr;

TEST_F(Planar4, MinimumTime) {
  EXPECT_NEAR(result_->t_star, 15.015, 0.15);
  EXPECT_LE(result_->newton_iterations, 25);
  EXPECT_LE(std::abs(result_->phi_at_t_star), problem_->settings.epsilon);
  EXPECT_EQ(result_->sigma_star, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(result_->hopf_solves, 16 * (result_->newton_iterations + 1));
  expect_bracket_preserved(*result_);
}

TEST_F(Planar4, DerivativeIdentity) {
  const double h = 1e-4;
  const double fd = (joint_value(*problem_, result_->t_star + h).phi -
                     joint_value(*problem_, result_->t_star - h).phi) / (2 * h);
  const double hamiltonian = newton_hamiltonian(*problem_, result_->final_value);
  EXPECT_LE(std::abs(fd + hamiltonian), 1e-2 * std::abs(hamiltonian));
}

TEST_F(Planar4, ResultRecomputesFromStoredValues) {
  double worst = -INFINITY;
  for (int i = 0; i < 4; ++i) {
    worst = std::max(worst, result_->per_pair_values(i, result_->sigma_star[i]));
  }
  EXPECT_EQ(worst, result_->phi_at_t_star);
}

TEST_F(Planar4, AssignmentStable) { EXPECT_TRUE(assignment_stable_near(*problem_, *result_)); }

TEST(NewtonDerivative, ParsesNames) {
  EXPECT_EQ(newton_derivative_from_string("bottleneck"), NewtonDerivative::kBottleneck);
  EXPECT_EQ(newton_derivative_from_string("algorithm1"), NewtonDerivative::kAlgorithm1);
  EXPECT_EQ(to_string(NewtonDerivative::kAlgorithm1), "algorithm1");
  EXPECT_THROW(newton_derivative_from_string("sum"), InvalidArgument);
}

}  // namespace
}  // namespace hopfcoord
