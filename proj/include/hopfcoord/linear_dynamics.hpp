#ifndef HOPFCOORD_LINEAR_DYNAMICS_HPP_
#define HOPFCOORD_LINEAR_DYNAMICS_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord {

// Real-part tolerance for the stability check. Marginally stable generators
// (pure integrators, the damped double integrator) have eigenvalues with
// zero real part.
inline constexpr double kStabilityTolerance = 1e-9;

// e^{sM} by scaling and squaring with a degree-13 Pade kernel.
inline Matrix mat_exp(const Matrix& m, double s) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument("mat_exp: matrix is " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ", not square");
  }
  if (!m.allFinite() || !std::isfinite(s)) {
    throw InvalidArgument("mat_exp: non-finite input");
  }
  if (m.size() == 0) return m;
  Matrix scaled = s * m;
  Matrix result = scaled.exp();
  if (!result.allFinite()) {
    throw NumericalFailure("mat_exp: result overflowed");
  }
  return result;
}

// One vehicle: x' = A x + B u with |u| <= 1 in the given norm.
class VehicleModel {
 public:
  VehicleModel(Matrix a, Matrix b, NormKind control_norm, std::string label = {})
      : a_(std::move(a)), b_(std::move(b)), control_norm_(control_norm),
        label_(std::move(label)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols()) {
      throw InvalidArgument("vehicle '" + label_ + "': A must be square and nonempty");
    }
    if (b_.rows() != a_.rows() || b_.cols() == 0) {
      throw DimensionMismatch("vehicle '" + label_ + "': B must have " +
                              std::to_string(a_.rows()) + " rows and >= 1 column");
    }
    if (!a_.allFinite() || !b_.allFinite()) {
      throw InvalidArgument("vehicle '" + label_ + "': non-finite entry in A or B");
    }
    if ((b_.array() == 0.0).all()) {
      throw InvalidArgument("vehicle '" + label_ + "': B has no nonzero entry");
    }
    Eigen::EigenSolver<Matrix> solver(a_, /*computeEigenvectors=*/false);
    const auto& eig = solver.eigenvalues();
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
      if (eig[k].real() > kStabilityTolerance) {
        throw InvalidArgument("vehicle '" + label_ +
                              "': A has an eigenvalue with positive real part (" +
                              std::to_string(eig[k].real()) + ")");
      }
    }
  }

  Eigen::Index state_dim() const { return a_.rows(); }
  Eigen::Index control_dim() const { return b_.cols(); }
  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  NormKind control_norm() const { return control_norm_; }
  const std::string& label() const { return label_; }

  // e^{sA} x: the drift-only flow. This is also the inverse of the
  // z = e^{-sA} x change of variables used by the Hopf objective.
  Vector propagate_free(const Vector& x, double s) const {
    check_state(x, "propagate_free");
    return mat_exp(a_, s) * x;
  }

  void check_state(const Vector& x, const char* where) const {
    if (x.size() != state_dim()) {
      throw DimensionMismatch(std::string(where) + ": vehicle '" + label_ +
                              "' expects a state of dimension " +
                              std::to_string(state_dim()) + ", got " +
                              std::to_string(x.size()));
    }
  }

 private:
  Matrix a_;
  Matrix b_;
  NormKind control_norm_;
  std::string label_;
};

// Block-diagonal composition of independent vehicles. The joint A and B are
// never formed; callers slice joint vectors per vehicle.
class JointModel {
 public:
  explicit JointModel(std::vector<VehicleModel> vehicles)
      : vehicles_(std::move(vehicles)) {
    if (vehicles_.empty()) {
      throw InvalidArgument("build_joint: vehicle list is empty");
    }
    for (const auto& v : vehicles_) {
      state_offsets_.push_back(state_dim_);
      control_offsets_.push_back(control_dim_);
      state_dim_ += v.state_dim();
      control_dim_ += v.control_dim();
    }
  }

  std::size_t size() const { return vehicles_.size(); }
  const VehicleModel& vehicle(std::size_t i) const { return vehicles_.at(i); }
  const std::vector<VehicleModel>& vehicles() const { return vehicles_; }
  Eigen::Index total_state_dim() const { return state_dim_; }
  Eigen::Index total_control_dim() const { return control_dim_; }
  Eigen::Index state_offset(std::size_t i) const { return state_offsets_.at(i); }

  Vector state_block(const Vector& joint, std::size_t i) const {
    return joint.segment(state_offsets_.at(i), vehicles_.at(i).state_dim());
  }

  void check_state(const Vector& joint, const char* where) const {
    if (joint.size() != state_dim_) {
      throw DimensionMismatch(std::string(where) + ": joint vector has dimension " +
                              std::to_string(joint.size()) + ", expected " +
                              std::to_string(state_dim_));
    }
  }

 private:
  std::vector<VehicleModel> vehicles_;
  std::vector<Eigen::Index> state_offsets_;
  std::vector<Eigen::Index> control_offsets_;
  Eigen::Index state_dim_ = 0;
  Eigen::Index control_dim_ = 0;
};

inline JointModel build_joint(std::vector<VehicleModel> vehicles) {
  return JointModel(std::move(vehicles));
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_LINEAR_DYNAMICS_HPP_
