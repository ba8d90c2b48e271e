#ifndef HOPFCOORD_NORMS_HPP_
#define HOPFCOORD_NORMS_HPP_

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "hopfcoord/errors.hpp"

namespace hopfcoord {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Norm used for a unit ball {u : |u| <= 1}. Control sets and goal regions
// are both described this way.
enum class NormKind { kTwo, kSup };

inline std::string_view to_string(NormKind kind) {
  return kind == NormKind::kTwo ? "two" : "sup";
}

inline NormKind norm_kind_from_string(std::string_view name) {
  if (name == "two" || name == "2") return NormKind::kTwo;
  if (name == "sup" || name == "inf") return NormKind::kSup;
  throw InvalidArgument("unknown norm kind '" + std::string(name) +
                        "' (expected 'two' or 'sup')");
}

inline double norm(const Vector& v, NormKind kind) {
  return kind == NormKind::kTwo ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

// Dual of `kind`: the 2-norm is self-dual, the sup-norm's dual is the 1-norm.
inline double dual_norm(const Vector& v, NormKind kind) {
  return kind == NormKind::kTwo ? v.norm() : v.lpNorm<1>();
}

// Smooth surrogate of the dual norm. 2-norm: sqrt(|v|^2 + mu^2) - mu.
// 1-norm: sum_j sqrt(v_j^2 + mu^2) - mu. Both vanish exactly at v = 0.
inline double smoothed_dual_norm(const Vector& v, NormKind kind, double mu) {
  if (kind == NormKind::kTwo) {
    return std::sqrt(v.squaredNorm() + mu * mu) - mu;
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    total += std::sqrt(v[j] * v[j] + mu * mu) - mu;
  }
  return total;
}

// Gradient of smoothed_dual_norm with respect to v. Lies strictly inside the
// primal unit ball, so it is always an admissible control.
inline Vector smoothed_dual_norm_gradient(const Vector& v, NormKind kind,
                                          double mu) {
  if (kind == NormKind::kTwo) {
    return v / std::sqrt(v.squaredNorm() + mu * mu);
  }
  Vector g(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    g[j] = v[j] / std::sqrt(v[j] * v[j] + mu * mu);
  }
  return g;
}

// Hessian of smoothed_dual_norm with respect to v.
inline Matrix smoothed_dual_norm_hessian(const Vector& v, NormKind kind, double mu) {
  if (kind == NormKind::kTwo) {
    const double root = std::sqrt(v.squaredNorm() + mu * mu);
    return (Matrix::Identity(v.size(), v.size()) - v * v.transpose() / (root * root)) / root;
  }
  Vector d(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double root = std::sqrt(v[j] * v[j] + mu * mu);
    d[j] = mu * mu / (root * root * root);
  }
  return d.asDiagonal();
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_NORMS_HPP_
