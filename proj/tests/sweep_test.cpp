#include "hopfcoord/sweep.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "test_problems.hpp"

namespace hopfcoord {
namespace {

using testing::toy_coordination;

std::vector<double> grid(double lo, double hi, int n) { return axis_nodes({lo, hi, n}); }

std::vector<double> sample(const std::vector<double>& xs, const std::vector<double>& ys,
                           double (*f)(double, double)) {
  std::vector<double> out;
  for (double x : xs)
    for (double y : ys) out.push_back(f(x, y));
  return out;
}

// Toy phi at t = 0: min over assignments of the worst interval distance.
double toy_phi_at_zero(double x1, double x2) {
  auto j = [](double x, double c) { return std::abs(x - c) - 1.0; };
  return std::min(std::max(j(x1, 3), j(x2, -3)), std::max(j(x1, -3), j(x2, 3)));
}

TEST(ZeroContours, CircleIsOneClosedLoop) {
  const auto xs = grid(-2, 2, 41), ys = grid(-2, 2, 41);
  const auto values = sample(xs, ys, [](double x, double y) { return std::hypot(x, y) - 1.0; });
  const auto lines = zero_contours(xs, ys, values);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].front(), lines[0].back());
  EXPECT_GT(lines[0].size(), 20u);
  for (const auto& p : lines[0]) EXPECT_NEAR(std::hypot(p[0], p[1]), 1.0, 5e-3);
}

TEST(ZeroContours, LineIsExactAndOpen) {
  const auto xs = grid(-1, 1, 11), ys = grid(-1, 1, 7);
  const auto values = sample(xs, ys, [](double x, double y) { return 0.3 * x - y + 0.05; });
  const auto lines = zero_contours(xs, ys, values);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_NE(lines[0].front(), lines[0].back());
  for (const auto& p : lines[0]) EXPECT_NEAR(0.3 * p[0] - p[1] + 0.05, 0.0, 1e-14);
}

// The diamond passes through grid nodes, where two edges share a crossing.
TEST(ZeroContours, LevelSetThroughNodesHasNoRepeatedPoints) {
  const auto xs = grid(-2, 2, 17), ys = grid(-2, 2, 17);
  const auto values =
      sample(xs, ys, [](double x, double y) { return std::abs(x) + std::abs(y) - 1.0; });
  const auto lines = zero_contours(xs, ys, values);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].front(), lines[0].back());
  for (std::size_t k = 0; k < lines[0].size(); ++k) {
    const auto& p = lines[0][k];
    EXPECT_NEAR(std::abs(p[0]) + std::abs(p[1]), 1.0, 1e-15);
    if (k > 0) {
      EXPECT_NE(p, lines[0][k - 1]);
    }
  }
}

TEST(ZeroContours, NoCrossingGivesNothing) {
  const auto xs = grid(0, 1, 5), ys = grid(0, 1, 5);
  EXPECT_TRUE(zero_contours(xs, ys, std::vector<double>(25, 1.0)).empty());
  EXPECT_THROW(zero_contours(xs, ys, std::vector<double>(24, 1.0)), DimensionMismatch);
}

TEST(ZeroContours, SeparateLoopsStaySeparate) {
  const auto xs = grid(-3, 3, 61), ys = grid(-1, 1, 21);
  const auto values = sample(xs, ys, [](double x, double y) {
    return std::min(std::hypot(x - 1.5, y), std::hypot(x + 1.5, y)) - 0.5;
  });
  EXPECT_EQ(zero_contours(xs, ys, values).size(), 2u);
}

// At t = 0 the zero set is the boundary of the goal set itself.
TEST(RunSweep, ToyAtZeroIsGoalBoundary) {
  SweepSpec spec{{{-6, 6, 41}, {-6, 6, 41}}, {0.0}};
  const SweepResult sweep = run_sweep(toy_coordination(), spec);
  ASSERT_EQ(sweep.values.size(), 1u);
  ASSERT_EQ(sweep.node_count(), 41u * 41u);
  for (std::size_t k = 0; k < sweep.node_count(); ++k) {
    const double x1 = sweep.axes[0][k / 41], x2 = sweep.axes[1][k % 41];
    EXPECT_NEAR(sweep.values[0][k], toy_phi_at_zero(x1, x2), 1e-6) << x1 << " " << x2;
  }
  // Two rectangles: [2,4]x[-4,-2] and [-4,-2]x[2,4].
  ASSERT_EQ(sweep.contours[0].size(), 2u);
  for (const auto& line : sweep.contours[0]) {
    EXPECT_EQ(line.front(), line.back());
    for (const auto& p : line) EXPECT_NEAR(toy_phi_at_zero(p[0], p[1]), 0.0, 0.3);
  }
}

TEST(RunSweep, ToyContourThroughStartAtArrival) {
  const double t_arrival = 4.0 * 5 / 9;  // 2.222, the sixth of ten samples on [0, 4]
  SweepSpec spec{{{-6, 6, 41}, {-6, 6, 41}}, {t_arrival}};
  const SweepResult sweep = run_sweep(toy_coordination(), spec);
  const double cell = 12.0 / 40;
  EXPECT_LE(distance_to_contours(sweep.contours[0], {4.667, 0.5}), cell);
  const double phi = joint_value(toy_coordination(), t_arrival).phi;
  EXPECT_NEAR(phi, 0.0, 2e-3);
}

TEST(RunSweep, DeterministicAcrossThreadCounts) {
  CoordinationProblem problem = toy_coordination();
  SweepSpec spec{{{-5, 5, 9}, {-5, 5, 9}}, {0.5, 1.5}};
  problem.settings.threads = 1;
  const SweepResult serial = run_sweep(problem, spec);
  problem.settings.threads = 3;
  const SweepResult parallel = run_sweep(problem, spec);
  EXPECT_EQ(serial.values, parallel.values);
  EXPECT_EQ(serial.contours, parallel.contours);
}

TEST(RunSweep, EmptyTimesGiveEmptyResult) {
  const SweepResult sweep = run_sweep(toy_coordination(), SweepSpec{{{-1, 1, 3}, {-1, 1, 3}}, {}});
  EXPECT_TRUE(sweep.values.empty());
  EXPECT_TRUE(sweep.contours.empty());
  EXPECT_EQ(sweep.axes.size(), 2u);
}

TEST(RunSweep, RejectsBadGrids) {
  EXPECT_THROW(run_sweep(toy_coordination(), SweepSpec{{{-1, 1, 3}}, {1.0}}), DimensionMismatch);
  EXPECT_THROW(run_sweep(toy_coordination(), SweepSpec{{{-1, 1, 1}, {-1, 1, 3}}, {1.0}}),
               InvalidArgument);
  EXPECT_THROW(run_sweep(toy_coordination(), SweepSpec{{{1, -1, 3}, {-1, 1, 3}}, {1.0}}),
               InvalidArgument);
  // Joint dimension 16 is far past the sweep limit.
  EXPECT_THROW(run_sweep(testing::planar4_coordination(), SweepSpec{{}, {1.0}}), InvalidArgument);
}

}  // namespace
}  // namespace hopfcoord
