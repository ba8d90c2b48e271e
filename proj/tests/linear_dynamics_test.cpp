#include "hopfcoord/linear_dynamics.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "test_models.hpp"

namespace hopfcoord {
namespace {

using testing::planar_vehicle;
using testing::toy_vehicle;
using testing::vec;

// Truncated Taylor series; independent of the Pade kernel.
Matrix power_series_exp(const Matrix& m, double s, int terms = 30) {
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix term = result;
  for (int k = 1; k < terms; ++k) {
    term = term * (s * m) / k;
    result += term;
  }
  return result;
}

// Random generator with eigenvalues in the closed left half plane:
// -(G G^T) - eps I plus a skew part.
Matrix random_stable(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix g(n, n), k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = dist(rng) / std::sqrt(n);
      k(i, j) = dist(rng) / std::sqrt(n);
    }
  }
  return -(g * g.transpose()) * 0.2 + (k - k.transpose()) * 0.5;
}

TEST(MatExp, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(1);
  const Matrix m = random_stable(rng, 3);
  EXPECT_TRUE(mat_exp(m, 0.0).isApprox(Matrix::Identity(3, 3), 0.0));
}

TEST(MatExp, ZeroGenerator) {
  EXPECT_DOUBLE_EQ(mat_exp(Matrix::Zero(1, 1), 4.0)(0, 0), 1.0);
}

TEST(MatExp, DampedAxisBlockMatchesClosedForm) {
  Matrix m(2, 2);
  m << 0, 1, 0, -1;
  const Matrix e = mat_exp(m, 1.0);
  const double em1 = std::exp(-1.0);
  EXPECT_NEAR(e(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(e(0, 1), 1.0 - em1, 1e-14);
  EXPECT_NEAR(e(1, 0), 0.0, 1e-14);
  EXPECT_NEAR(e(1, 1), em1, 1e-14);
  EXPECT_NEAR(e(0, 1), 0.63212, 1e-5);
  EXPECT_TRUE(e.isApprox(power_series_exp(m, 1.0), 1e-13));
}

TEST(MatExp, MatchesPowerSeriesOnRandomMatrices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_stable(rng, 1 + trial % 6);
    const double s = 0.25 + 0.1 * trial;
    EXPECT_TRUE(mat_exp(m, s).isApprox(power_series_exp(m, s, 60), 1e-11)) << trial;
  }
}

TEST(MatExp, RejectsBadInput) {
  EXPECT_THROW(mat_exp(Matrix::Zero(2, 3), 1.0), InvalidArgument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = NAN;
  EXPECT_THROW(mat_exp(bad, 1.0), InvalidArgument);
  EXPECT_THROW(mat_exp(Matrix::Zero(2, 2), INFINITY), InvalidArgument);
}

TEST(MatExp, SemigroupInverseAndDeterminant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> times(-20.0, 20.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 8;
    const Matrix m = random_stable(rng, n);
    const double s = times(rng), u = times(rng);
    const Matrix whole = mat_exp(m, s + u);
    const Matrix split = mat_exp(m, s) * mat_exp(m, u);
    EXPECT_LE((whole - split).norm(), 1e-10 * (1.0 + whole.norm())) << trial;

    const Matrix round_trip = mat_exp(m, s) * mat_exp(m, -s);
    EXPECT_LE((round_trip - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9) << trial;

    const double det = mat_exp(m, s).determinant();
    const double expected = std::exp(s * m.trace());
    EXPECT_NEAR(det / expected, 1.0, 1e-8) << trial;
  }
}

TEST(VehicleModel, RejectsUnstableGenerator) {
  EXPECT_THROW(VehicleModel(Matrix::Constant(1, 1, 0.1), Matrix::Ones(1, 1), NormKind::kSup),
               InvalidArgument);
  // Marginal stability is admitted.
  EXPECT_NO_THROW(toy_vehicle(3.0));
  EXPECT_NO_THROW(planar_vehicle());
}

TEST(VehicleModel, RejectsZeroInputMatrixAndBadShapes) {
  EXPECT_THROW(VehicleModel(Matrix::Zero(1, 1), Matrix::Zero(1, 1), NormKind::kSup),
               InvalidArgument);
  EXPECT_THROW(VehicleModel(Matrix::Zero(2, 2), Matrix::Ones(3, 1), NormKind::kSup),
               DimensionMismatch);
  EXPECT_THROW(VehicleModel(Matrix::Zero(2, 3), Matrix::Ones(2, 1), NormKind::kSup),
               InvalidArgument);
}

TEST(PropagateFree, Examples) {
  EXPECT_DOUBLE_EQ(toy_vehicle(3.0).propagate_free(vec({4.667}), 2.0)[0], 4.667);

  const VehicleModel planar = planar_vehicle();
  EXPECT_TRUE(planar.propagate_free(vec({3, -10, -1, 1}), 0.0).isApprox(vec({3, -10, -1, 1})));

  const Vector moved = planar.propagate_free(vec({0, 0, 1, 0}), 1.0);
  const double em1 = std::exp(-1.0);
  EXPECT_NEAR(moved[0], 1.0 - em1, 1e-14);
  EXPECT_NEAR(moved[1], 0.0, 1e-14);
  EXPECT_NEAR(moved[2], em1, 1e-14);
  EXPECT_NEAR(moved[3], 0.0, 1e-14);

  EXPECT_THROW(planar.propagate_free(vec({1, 2}), 1.0), DimensionMismatch);
}

TEST(BuildJoint, DimensionsAddUp) {
  const JointModel toy = build_joint({toy_vehicle(3.0, "v1"), toy_vehicle(1.0, "v2")});
  EXPECT_EQ(toy.total_state_dim(), 2);
  EXPECT_EQ(toy.total_control_dim(), 2);
  EXPECT_EQ(toy.vehicle(1).label(), "v2");

  const JointModel single = build_joint({planar_vehicle()});
  EXPECT_EQ(single.total_state_dim(), 4);
  EXPECT_EQ(single.total_control_dim(), 2);

  const JointModel planar = build_joint(
      {planar_vehicle(), planar_vehicle(), planar_vehicle(), planar_vehicle()});
  EXPECT_EQ(planar.total_state_dim(), 16);
  EXPECT_EQ(planar.total_control_dim(), 8);
  EXPECT_EQ(planar.state_offset(3), 12);

  EXPECT_THROW(build_joint({}), InvalidArgument);
}

}  // namespace
}  // namespace hopfcoord
