#ifndef HOPFCOORD_HAMILTONIAN_HPP_
#define HOPFCOORD_HAMILTONIAN_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/linear_dynamics.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord {

struct SmoothingConfig {
  double mu = 1e-6;

  bool operator==(const SmoothingConfig&) const = default;

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw InvalidArgument("smoothing parameter mu must be positive");
    }
  }
};

// Composite Gauss-Legendre rule on [0, horizon].
class QuadratureGrid {
 public:
  QuadratureGrid() = default;

  // `nodes` total nodes split evenly over `panels` sub-intervals.
  static QuadratureGrid gauss_legendre(double horizon, int nodes, int panels = 1) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
      throw InvalidArgument("quadrature horizon must be finite and >= 0");
    }
    if (nodes < 1 || panels < 1 || nodes % panels != 0) {
      throw InvalidArgument("quadrature: node count " + std::to_string(nodes) +
                            " must be a positive multiple of the panel count " +
                            std::to_string(panels));
    }
    QuadratureGrid grid;
    grid.horizon_ = horizon;
    if (horizon == 0.0) return grid;
    const int per_panel = nodes / panels;
    const auto [xs, ws] = reference_rule(per_panel);
    const double width = horizon / panels;
    for (int k = 0; k < panels; ++k) {
      const double left = k * width;
      for (int q = 0; q < per_panel; ++q) {
        grid.nodes_.push_back(left + 0.5 * width * (xs[q] + 1.0));
        grid.weights_.push_back(0.5 * width * ws[q]);
      }
    }
    return grid;
  }

  // `per_panel` nodes on each interval between consecutive sorted edges,
  // which must run from 0 to the horizon.
  static QuadratureGrid composite(const std::vector<double>& edges, int per_panel) {
    if (edges.size() < 2 || edges.front() != 0.0 || per_panel < 1 ||
        !std::is_sorted(edges.begin(), edges.end())) {
      throw InvalidArgument("quadrature: edges must be sorted, start at 0 and span a panel");
    }
    QuadratureGrid grid;
    grid.horizon_ = edges.back();
    const auto [xs, ws] = reference_rule(per_panel);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double width = edges[k + 1] - edges[k];
      if (!(width > 0.0)) continue;
      for (int q = 0; q < per_panel; ++q) {
        grid.nodes_.push_back(edges[k] + 0.5 * width * (xs[q] + 1.0));
        grid.weights_.push_back(0.5 * width * ws[q]);
      }
    }
    return grid;
  }

  // The uniform composite rule with extra panel edges at each break and at
  // geometrically graded distances from it, so kinks of the integrand sit on
  // panel edges.
  static QuadratureGrid with_breaks(double horizon, int nodes, int panels,
                                    const std::vector<double>& breaks) {
    const QuadratureGrid uniform = gauss_legendre(horizon, nodes, panels);
    if (horizon == 0.0 || breaks.empty()) return uniform;
    const double width = horizon / panels;
    std::vector<double> edges;
    for (int k = 0; k <= panels; ++k) edges.push_back(k == panels ? horizon : k * width);
    for (double b : breaks) {
      edges.push_back(b);
      for (double offset : {0.1, 0.01, 0.001}) {
        edges.push_back(b - offset * width);
        edges.push_back(b + offset * width);
      }
    }
    std::vector<double> kept;
    std::sort(edges.begin(), edges.end());
    for (double e : edges) {
      if (e < 0.0 || e > horizon) continue;
      if (!kept.empty() && e - kept.back() <= 1e-12 * horizon) continue;
      kept.push_back(e);
    }
    kept.front() = 0.0;
    if (horizon - kept.back() <= 1e-12 * horizon) kept.back() = horizon;
    else kept.push_back(horizon);
    return composite(kept, nodes / panels);
  }

  double horizon() const { return horizon_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  // Nodes (ascending) and weights on [-1, 1] by Newton iteration on P_n.
  static std::pair<std::vector<double>, std::vector<double>> reference_rule(int n) {
    // Returns P_n(x) and P_n'(x) via the three-term recurrence.
    auto legendre = [n](double x) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    std::vector<double> xs(n), ws(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      for (int iter = 0; iter < 100; ++iter) {
        const auto [p, dp] = legendre(x);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double dp = legendre(x).second;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      xs[i] = -x;
      xs[n - 1 - i] = x;
      ws[i] = w;
      ws[n - 1 - i] = w;
    }
    if (n % 2 == 1) xs[n / 2] = 0.0;
    return {xs, ws};
  }

  double horizon_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Transformed Hamiltonian  H^(s, p) = |-B^T e^{sA^T} p|_*  (smoothed).
inline double transformed_hamiltonian(const VehicleModel& model, double s,
                                      const Vector& p, const SmoothingConfig& smoothing) {
  model.check_state(p, "transformed_hamiltonian");
  const Vector v = -(mat_exp(model.a(), s) * model.b()).transpose() * p;
  return smoothed_dual_norm(v, model.control_norm(), smoothing.mu);
}

inline Vector hamiltonian_gradient(const VehicleModel& model, double s, const Vector& p,
                                   const SmoothingConfig& smoothing) {
  model.check_state(p, "hamiltonian_gradient");
  const Matrix k = mat_exp(model.a(), s) * model.b();
  const Vector v = -k.transpose() * p;
  return -k * smoothed_dual_norm_gradient(v, model.control_norm(), smoothing.mu);
}

// Times s in (0, horizon) where s -> H^(s, p) has a kink, up to smoothing:
// sign changes of a component of v(s) = -B^T e^{sA^T} p for sup-norm
// controls, and near-zero local minima of |v(s)| for 2-norm controls. Found
// on `samples` uniform intervals, then refined by bisection or golden
// section.
inline std::vector<double> find_switch_times(const VehicleModel& model, double horizon,
                                             const Vector& p, int samples = 400) {
  model.check_state(p, "find_switch_times");
  std::vector<double> out;
  // Without drift v(s) is constant.
  if (!(horizon > 0.0) || samples < 2 || model.a().isZero(0.0)) return out;
  const double h = horizon / samples;
  const Matrix bt = model.b().transpose();
  auto v_at = [&](double s) -> Vector { return -bt * (mat_exp(model.a().transpose(), s) * p); };
  const Matrix step = mat_exp(model.a().transpose(), h);
  std::vector<Vector> v(samples + 1);
  Vector lambda = p;
  for (int k = 0; k <= samples; ++k) {
    v[k] = -bt * lambda;
    lambda = step * lambda;
  }

  if (model.control_norm() == NormKind::kSup) {
    for (Eigen::Index j = 0; j < bt.rows(); ++j) {
      for (int k = 0; k < samples; ++k) {
        if (!(v[k][j] * v[k + 1][j] < 0.0)) continue;
        double lo = k * h, hi = (k + 1) * h;
        const double sign_lo = v[k][j];
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (v_at(mid)[j] * sign_lo > 0.0 ? lo : hi) = mid;
        }
        out.push_back(0.5 * (lo + hi));
      }
    }
  } else {
    std::vector<double> g(samples + 1);
    double peak = 0.0;
    for (int k = 0; k <= samples; ++k) peak = std::max(peak, g[k] = v[k].norm());
    for (int k = 1; k < samples; ++k) {
      if (!(g[k] <= g[k - 1] && g[k] < g[k + 1] && g[k] < 0.1 * peak)) continue;
      double lo = (k - 1) * h, hi = (k + 1) * h;
      const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
      double fa = v_at(a).squaredNorm(), fb = v_at(b).squaredNorm();
      for (int it = 0; it < 80; ++it) {
        if (fa < fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - ratio * (hi - lo);
          fa = v_at(a).squaredNorm();
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + ratio * (hi - lo);
          fb = v_at(b).squaredNorm();
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> kept;
  for (double s : out) {
    if (s <= 1e-9 * horizon || s >= horizon * (1.0 - 1e-9)) continue;
    if (!kept.empty() && s - kept.back() <= 1e-9 * horizon) continue;
    kept.push_back(s);
  }
  return kept;
}

// e^{s_k A} B at every quadrature node; built once per (vehicle, horizon) and
// reused by every objective evaluation of the solves sharing that horizon.
// Nodes with identical products (all of them when A = 0) are merged into one
// term carrying the summed weight.
class NodeProducts {
 public:
  struct Term {
    Matrix product;
    double weight = 0.0;
  };

  NodeProducts(const VehicleModel& model, const QuadratureGrid& grid)
      : grid_(grid), kind_(model.control_norm()) {
    products_.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      products_.push_back(mat_exp(model.a(), grid.nodes()[k]) * model.b());
      const double w = grid.weights()[k];
      auto same = std::find_if(terms_.begin(), terms_.end(),
                               [&](const Term& t) { return t.product == products_.back(); });
      if (same != terms_.end()) {
        same->weight += w;
      } else {
        terms_.push_back({products_.back(), w});
      }
    }
  }

  const QuadratureGrid& grid() const { return grid_; }
  NormKind control_norm() const { return kind_; }
  // e^{s_k A} B in node order.
  const std::vector<Matrix>& products() const { return products_; }
  const std::vector<Term>& terms() const { return terms_; }

  // sum_k w_k H^(s_k, p)
  double integral(const Vector& p, double mu) const {
    double total = 0.0;
    for (const auto& t : terms_) {
      const Vector v = -t.product.transpose() * p;
      total += t.weight * smoothed_dual_norm(v, kind_, mu);
    }
    return total;
  }

  // Value and gradient of the integral in one pass.
  double integral_with_gradient(const Vector& p, double mu, Vector& gradient) const {
    gradient.setZero(p.size());
    double total = 0.0;
    for (const auto& t : terms_) {
      const Vector v = -t.product.transpose() * p;
      total += t.weight * smoothed_dual_norm(v, kind_, mu);
      gradient.noalias() -= t.weight * (t.product * smoothed_dual_norm_gradient(v, kind_, mu));
    }
    return total;
  }

  // Hessian of the integral with respect to p.
  Matrix integral_hessian(const Vector& p, double mu) const {
    Matrix hessian = Matrix::Zero(p.size(), p.size());
    for (const auto& t : terms_) {
      const Vector v = -t.product.transpose() * p;
      hessian.noalias() +=
          t.weight * (t.product * smoothed_dual_norm_hessian(v, kind_, mu) * t.product.transpose());
    }
    return hessian;
  }

 private:
  QuadratureGrid grid_;
  NormKind kind_;
  std::vector<Matrix> products_;
  std::vector<Term> terms_;
};

inline double integral_hamiltonian(const VehicleModel& model, const QuadratureGrid& grid,
                                   const Vector& p, const SmoothingConfig& smoothing) {
  model.check_state(p, "integral_hamiltonian");
  if (grid.horizon() == 0.0) return 0.0;
  return NodeProducts(model, grid).integral(p, smoothing.mu);
}

// Untransformed per-vehicle Hamiltonian  -x^T A^T p + |-B^T p|_*  (smoothed).
inline double vehicle_hamiltonian(const VehicleModel& model, const Vector& x,
                                  const Vector& p, const SmoothingConfig& smoothing) {
  model.check_state(x, "vehicle_hamiltonian");
  model.check_state(p, "vehicle_hamiltonian");
  const Vector v = -model.b().transpose() * p;
  return -(model.a() * x).dot(p) + smoothed_dual_norm(v, model.control_norm(), smoothing.mu);
}

// Sum of the per-vehicle Hamiltonians over the block-diagonal joint system.
inline double joint_hamiltonian(const JointModel& joint, const Vector& x, const Vector& p,
                                const SmoothingConfig& smoothing) {
  joint.check_state(x, "joint_hamiltonian");
  joint.check_state(p, "joint_hamiltonian");
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    total += vehicle_hamiltonian(joint.vehicle(i), joint.state_block(x, i),
                                 joint.state_block(p, i), smoothing);
  }
  return total;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_HAMILTONIAN_HPP_
