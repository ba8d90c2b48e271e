#ifndef HOPFCOORD_HOPF_SOLVER_HPP_
#define HOPFCOORD_HOPF_SOLVER_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>
#include <string>
#include <utility>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/goal_model.hpp"
#include "hopfcoord/hamiltonian.hpp"
#include "hopfcoord/linear_dynamics.hpp"

namespace hopfcoord {

// Settings for the log-barrier Newton method that minimizes the Hopf
// objective over the conjugate's domain.
struct OptimizerConfig {
  int max_iters = 500;     // total Newton steps over all barrier stages
  double grad_tol = 1e-8;  // on the projected-gradient norm
  double sufficient_decrease = 1e-4;
  double backtrack = 0.5;
  double barrier_growth = 10.0;

  bool operator==(const OptimizerConfig&) const = default;

  void validate() const {
    if (max_iters <= 0 || !(grad_tol > 0.0) ||
        !(sufficient_decrease > 0.0 && sufficient_decrease < 1.0) ||
        !(backtrack > 0.0 && backtrack < 1.0) || !(barrier_growth > 1.0)) {
      throw InvalidArgument(
          "optimizer settings must be positive (line-search factors in (0,1), barrier growth > 1)");
    }
  }
};

// One (vehicle, goal, horizon) instance of the Hopf minimization.
struct HopfProblem {
  VehicleModel model;
  GoalRegion region;
  Vector x0;
  double horizon = 0.0;
  int quad_nodes = 50;
  int quad_panels = 5;
  SmoothingConfig smoothing{};
  OptimizerConfig optimizer{};
  // Re-solve with panel edges at the integrand's kinks (control switches).
  bool split_at_switches = true;

  void validate() const {
    model.check_state(x0, "HopfProblem");
    if (region.dim() != model.state_dim()) {
      throw DimensionMismatch("HopfProblem: goal '" + region.label() +
                              "' does not live in the state space of vehicle '" +
                              model.label() + "'");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
      throw InvalidArgument("HopfProblem: horizon must be finite and >= 0");
    }
    if (!x0.allFinite()) throw InvalidArgument("HopfProblem: non-finite initial state");
    smoothing.validate();
    optimizer.validate();
  }
};

struct HopfSolution {
  double value = 0.0;  // phi(x0, t) = -objective_at_star
  Vector p_tilde_star;
  double objective_at_star = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double projected_gradient_norm = 0.0;
  // Frank-Wolfe gap <g, p> + max_{|q|_* <= 1} <-g, q>; bounds the
  // suboptimality of objective_at_star from above.
  double certificate_gap = 0.0;
  // Kinks of the integrand at p_tilde_star used as panel edges; empty when
  // the uniform grid was kept.
  std::vector<double> switch_times;
};

// f(p) = J*(p) + sum_k w_k H^(s_k, p) - <e^{tA} x, p>  and its gradient.
class HopfObjective {
 public:
  struct Evaluation {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;  // filled only on request
  };

  explicit HopfObjective(const HopfProblem& problem,
                         std::shared_ptr<const NodeProducts> products = nullptr)
      : region_(problem.region), mu_(problem.smoothing.mu),
        drifted_(problem.model.propagate_free(problem.x0, problem.horizon)),
        products_(std::move(products)) {
    if (!products_) {
      products_ = std::make_shared<NodeProducts>(
          problem.model, QuadratureGrid::gauss_legendre(problem.horizon, problem.quad_nodes,
                                                        problem.quad_panels));
    }
  }

  // With check_domain = false the smooth formula is extended past the dual
  // ball (used for Newton trial points just outside the face).
  Evaluation evaluate(const Vector& p, bool with_hessian = false,
                      bool check_domain = true) const {
    ConjugateValue conj = region_.eval_conjugate(p);
    if (!check_domain) {
      conj.value = p.dot(region_.center()) + region_.radius();
      conj.subgradient = region_.center();
    } else if (!conj.feasible) {
      throw DomainViolation("hopf_objective: costate outside the conjugate domain (|p|_* = " +
                            std::to_string(region_.dual_norm_of(p)) + ")");
    }
    Evaluation out;
    const double integral = products_->integral_with_gradient(p, mu_, out.gradient);
    out.value = conj.value + integral - drifted_.dot(p);
    out.gradient += conj.subgradient - drifted_;
    if (with_hessian) out.hessian = products_->integral_hessian(p, mu_);
    if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
      throw NumericalFailure("hopf_objective: non-finite objective");
    }
    if (with_hessian && !out.hessian.allFinite()) {
      throw NumericalFailure("hopf_objective: non-finite Hessian");
    }
    return out;
  }

  const GoalRegion& region() const { return region_; }
  const NodeProducts& node_products() const { return *products_; }
  double mu() const { return mu_; }
  // e^{tA} x0
  const Vector& drifted_state() const { return drifted_; }

 private:
  GoalRegion region_;
  double mu_;
  Vector drifted_;
  std::shared_ptr<const NodeProducts> products_;
};

inline std::pair<double, Vector> hopf_objective(const HopfProblem& problem, const Vector& p) {
  problem.validate();
  problem.region.check_dim(p, "hopf_objective");
  auto eval = HopfObjective(problem).evaluate(p);
  return {eval.value, std::move(eval.gradient)};
}

namespace detail {

// Self-concordant barrier for the conjugate's domain in the scaled variables
// q, where it is {sum_k |q_k|_* <= 1}. Auxiliary variables bound each
// 2-norm block (second-order cones |q_k| < t_k) or each component of a
// 1-norm (|q_j| < u_j), and one linear term keeps their sum below one.
class DualBallBarrier {
 public:
  explicit DualBallBarrier(const GoalRegion& region)
      : kind_(region.norm_kind()), n_(region.dim()) {
    if (kind_ == NormKind::kTwo) {
      for (const auto& b : region.blocks()) blocks_.emplace_back(b.offset, b.size);
    } else {
      for (Eigen::Index j = 0; j < n_; ++j) blocks_.emplace_back(j, 1);
    }
  }

  Eigen::Index size() const { return n_ + static_cast<Eigen::Index>(blocks_.size()); }
  // Barrier parameter; nu / tau bounds the suboptimality on the central path.
  double parameter() const { return 2.0 * static_cast<double>(blocks_.size()) + 1.0; }

  // Strictly feasible lift of q with sum_k |q_k| < 1.
  Vector lift(const Vector& q) const {
    Vector w(size());
    w.head(n_) = q;
    double used = 0.0;
    for (const auto& [offset, len] : blocks_) used += q.segment(offset, len).norm();
    const double slack = (1.0 - used) / (2.0 * static_cast<double>(blocks_.size()));
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      w[n_ + k] = q.segment(blocks_[k].first, blocks_[k].second).norm() + slack;
    }
    return w;
  }

  bool interior(const Vector& w) const {
    double total = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const double t = w[n_ + k];
      if (!(t > w.segment(blocks_[k].first, blocks_[k].second).norm())) return false;
      total += t;
    }
    return total < 1.0;
  }

  double value(const Vector& w) const {
    double out = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const double t = w[n_ + k];
      out -= std::log(t * t - w.segment(blocks_[k].first, blocks_[k].second).squaredNorm());
      total += t;
    }
    return out - std::log(1.0 - total);
  }

  void add_derivatives(const Vector& w, Vector& gradient, Matrix& hessian) const {
    double total = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto [offset, len] = blocks_[k];
      const Eigen::Index tk = n_ + static_cast<Eigen::Index>(k);
      const double t = w[tk];
      const Vector z = w.segment(offset, len);
      const double s = t * t - z.squaredNorm();
      // -log s with grad s = (-2 z, 2 t) and hess s = diag(-2 I, 2).
      Vector ds(len + 1);
      ds.head(len) = -2.0 * z;
      ds[len] = 2.0 * t;
      std::vector<Eigen::Index> index(len + 1);
      for (Eigen::Index j = 0; j < len; ++j) index[j] = offset + j;
      index[len] = tk;
      for (Eigen::Index a = 0; a <= len; ++a) {
        gradient[index[a]] -= ds[a] / s;
        for (Eigen::Index b = 0; b <= len; ++b) {
          hessian(index[a], index[b]) += ds[a] * ds[b] / (s * s);
        }
        hessian(index[a], index[a]) += (a < len ? 2.0 : -2.0) / s;
      }
      total += t;
    }
    const double slack = 1.0 - total;
    const Eigen::Index m = static_cast<Eigen::Index>(blocks_.size());
    gradient.tail(m).array() += 1.0 / slack;
    hessian.bottomRightCorner(m, m).array() += 1.0 / (slack * slack);
  }

 private:
  NormKind kind_;
  Eigen::Index n_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks_;
};

// Newton iteration on a guessed active face of the scaled dual ball, started
// from a nearly optimal point. `boundary` selects between the face
// sum_k |q_k|_* = 1 (blocks or components far from zero free, the rest
// pinned at zero) and the interior, where it is plain Newton on f. On the
// face each step solves the KKT system with a least-squares multiplier and
// is pulled back onto the face by rescaling. Steps are halved until f
// decreases: at a node where v(s_k) passes through zero the curvature is of
// order 1/mu, and full steps overshoot. Returns nullopt when the guess is
// inconsistent (sign change, leaving the ball, singular system).
template <class Evaluate>
std::optional<Vector> polish_on_face(const GoalRegion& region, const Vector& q0,
                                     bool boundary, const Evaluate& evaluate) {
  const Eigen::Index n = q0.size();
  const bool two = region.norm_kind() == NormKind::kTwo;
  std::vector<Eigen::Index> free;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> active_blocks;
  Vector sign = Vector::Zero(n);
  constexpr double kActive = 1e-6;
  if (!boundary) {
    for (Eigen::Index j = 0; j < n; ++j) free.push_back(j);
  } else if (two) {
    for (const auto& b : region.blocks()) {
      if (q0.segment(b.offset, b.size).norm() > kActive) {
        active_blocks.emplace_back(b.offset, b.size);
        for (Eigen::Index j = 0; j < b.size; ++j) free.push_back(b.offset + j);
      }
    }
  } else {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(q0[j]) > kActive) {
        free.push_back(j);
        sign[j] = q0[j] > 0.0 ? 1.0 : -1.0;
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(free.size());
  if (m == 0) return std::nullopt;

  auto scaled_norm = [&](const Vector& q) {
    double total = 0.0;
    for (const auto& b : region.blocks()) {
      total += dual_norm(q.segment(b.offset, b.size), region.norm_kind());
    }
    return total;
  };
  // Onto the face (or check the ball, for the interior).
  auto retract = [&](Vector q) -> std::optional<Vector> {
    if (!q.allFinite()) return std::nullopt;
    if (!boundary) {
      if (scaled_norm(q) > 1.0) return std::nullopt;
      return q;
    }
    for (Eigen::Index j : free) {
      if (!two && q[j] * sign[j] <= 0.0) return std::nullopt;
    }
    const double total = scaled_norm(q);
    if (!(total > 0.0)) return std::nullopt;
    return Vector(q / total);
  };

  Vector start = Vector::Zero(n);
  for (Eigen::Index j : free) start[j] = q0[j];
  auto maybe = retract(start);
  if (!maybe) return std::nullopt;
  Vector q = *maybe;
  auto current = evaluate(q);
  double lambda = 0.0;
  // Stationarity residual: the gradient, or its part tangent to the face.
  auto residual = [&](const Vector& point, const Vector& gradient) {
    Vector g(m);
    for (Eigen::Index a = 0; a < m; ++a) g[a] = gradient[free[a]];
    if (!boundary) return g.norm();
    Vector dc(m);
    if (two) {
      Eigen::Index a = 0;
      for (const auto& [offset, len] : active_blocks) {
        dc.segment(a, len) = point.segment(offset, len).normalized();
        a += len;
      }
    } else {
      for (Eigen::Index a = 0; a < m; ++a) dc[a] = sign[free[a]];
    }
    return (g - dc * (dc.dot(g) / dc.squaredNorm())).norm();
  };
  double current_residual = residual(q, current.gradient);
  for (int iter = 0; iter < 60; ++iter) {
    Vector g(m);
    Matrix h(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      g[a] = current.gradient[free[a]];
      for (Eigen::Index b = 0; b < m; ++b) h(a, b) = current.hessian(free[a], free[b]);
    }
    Vector step;
    if (!boundary) {
      step = -h.ldlt().solve(g);
    } else {
      // Gradient and curvature of c(q) = sum |q_k|_* - 1 on the face.
      Vector dc(m);
      Matrix curvature = Matrix::Zero(m, m);
      if (two) {
        Eigen::Index a = 0;
        for (const auto& [offset, len] : active_blocks) {
          const Vector z = q.segment(offset, len);
          const double nz = z.norm();
          if (!(nz > 0.0)) return std::nullopt;
          const Vector u = z / nz;
          dc.segment(a, len) = u;
          curvature.block(a, a, len, len) =
              (Matrix::Identity(len, len) - u * u.transpose()) / nz;
          a += len;
        }
      } else {
        for (Eigen::Index a = 0; a < m; ++a) dc[a] = sign[free[a]];
      }
      lambda = -dc.dot(g) / dc.squaredNorm();
      Matrix kkt = Matrix::Zero(m + 1, m + 1);
      kkt.topLeftCorner(m, m) = h + lambda * curvature;
      kkt.topRightCorner(m, 1) = dc;
      kkt.bottomLeftCorner(1, m) = dc.transpose();
      Vector rhs = Vector::Zero(m + 1);
      rhs.head(m) = -(g + lambda * dc);
      step = kkt.colPivHouseholderQr().solve(rhs).head(m);
    }
    if (!step.allFinite()) return std::nullopt;
    if (step.norm() <= 1e-15 * (1.0 + q.norm())) break;
    // Accept a decrease of f, or, once f is flat to rounding, a decrease of
    // the residual.
    bool moved = false;
    const double flat = 1e-14 * (1.0 + std::abs(current.value));
    for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
      Vector trial = q;
      for (Eigen::Index a = 0; a < m; ++a) trial[free[a]] += alpha * step[a];
      const auto pulled = retract(trial);
      if (!pulled) continue;
      auto eval = evaluate(*pulled);
      const double trial_residual = residual(*pulled, eval.gradient);
      if (eval.value < current.value - flat ||
          (eval.value <= current.value + flat && trial_residual < current_residual)) {
        q = *pulled;
        current = std::move(eval);
        current_residual = trial_residual;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    if ((q - q0).norm() > 0.1) return std::nullopt;
  }
  if (boundary && !(lambda >= 0.0)) return std::nullopt;
  return region.project_scaled_dual(q);
}

// One barrier run on a fixed quadrature grid; horizon > 0.
//
// The smoothed dual norm is a second-order-cone norm, sqrt(|v|^2 + mu^2) - mu
// = |(v, mu)| - mu, so the minimization is a small cone program with a linear
// objective: one epigraph variable s_k >= |(K_k^T p, mu)| per quadrature node
// (per node and control component for 1-norm duals). A primal log-barrier
// method follows the central path with damped Newton steps, which need no
// line search because the centering function is self-concordant. The node
// variables are eliminated by a Schur complement, so each Newton system has
// the size of the state plus the ball's auxiliaries. After every barrier
// stage the iterate is polished on its active face, and the run stops once
// the projected gradient of the smoothed objective meets grad_tol.
//
// The first iterate is derived from project_dual(warm_start) when given,
// otherwise from project_dual(e^{tA} x0). Iterates live in the variables
// q = a p of GoalRegion::dual_scaling, where the domain is the unweighted
// group ball; for a single-block goal a = 1. The projected-gradient norm is
// measured in those variables.
inline HopfSolution solve_hopf_on(const HopfProblem& problem,
                                  const std::optional<Vector>& warm_start,
                                  std::shared_ptr<const NodeProducts> products) {
  const GoalRegion& region = problem.region;
  HopfSolution sol;
  const HopfObjective objective(problem, std::move(products));
  const OptimizerConfig& opt = problem.optimizer;
  const Eigen::Index n = problem.x0.size();
  const Vector scale = region.dual_scaling();
  const Vector inv_scale = scale.cwiseInverse();
  const detail::DualBallBarrier ball(region);
  const Eigen::Index nz = ball.size();
  const double mu = objective.mu();

  // Cones |(M_c^T q, mu)| <= s_c with weights w_c.
  std::vector<Matrix> cone_maps;
  std::vector<double> cone_weights;
  {
    const NodeProducts& nodes = objective.node_products();
    for (const auto& term : nodes.terms()) {
      const Matrix m = inv_scale.asDiagonal() * term.product;
      const double w = term.weight;
      // Identical maps share one cone with the summed weight.
      auto add = [&](const Matrix& map) {
        for (std::size_t c = 0; c < cone_maps.size(); ++c) {
          if (cone_maps[c] == map) {
            cone_weights[c] += w;
            return;
          }
        }
        cone_maps.push_back(map);
        cone_weights.push_back(w);
      };
      if (nodes.control_norm() == NormKind::kTwo) {
        add(m);
      } else {
        for (Eigen::Index j = 0; j < m.cols(); ++j) add(m.col(j));
      }
    }
  }
  const std::size_t cones = cone_maps.size();
  // Linear part of the objective in q.
  const Vector linear = (region.center() - objective.drifted_state()).cwiseProduct(inv_scale);

  auto evaluate = [&](const Vector& q, bool with_hessian, bool check_domain = true) {
    auto eval = objective.evaluate(q.cwiseProduct(inv_scale), with_hessian, check_domain);
    eval.gradient = eval.gradient.cwiseProduct(inv_scale);
    if (with_hessian) {
      eval.hessian = inv_scale.asDiagonal() * eval.hessian * inv_scale.asDiagonal();
    }
    ++sol.evaluations;
    return eval;
  };
  auto projected_gradient = [&](const Vector& q, const Vector& g) {
    return (region.project_scaled_dual(q - g) - q).norm();
  };
  auto cone_slack = [&](std::size_t c, const Vector& q, double s) {
    return s * s - (cone_maps[c].transpose() * q).squaredNorm() - mu * mu;
  };

  const Vector start = warm_start && warm_start->size() == n && warm_start->allFinite()
                           ? *warm_start
                           : objective.drifted_state();
  // Pull the start off the boundary; the barrier needs strict feasibility.
  Vector z = ball.lift(0.9 * region.project_dual(start).cwiseProduct(scale));
  Vector s(static_cast<Eigen::Index>(cones));
  // For fixed q the centering function separates in s: each s_c minimizes
  // tau w_c s - log(s^2 - a_c^2) in closed form.
  auto center_epigraphs = [&](double tau) {
    for (std::size_t c = 0; c < cones; ++c) {
      const double a_sq = (cone_maps[c].transpose() * z.head(n)).squaredNorm() + mu * mu;
      const double inv_w = 1.0 / (tau * cone_weights[c]);
      s[c] = inv_w + std::sqrt(inv_w * inv_w + a_sq);
    }
  };
  center_epigraphs(1.0);

  Vector q = z.head(n);
  auto current = evaluate(q, true);
  double pg = projected_gradient(q, current.gradient);
  int iter = 0;
  for (double tau = 1.0; pg > opt.grad_tol && iter < opt.max_iters && tau < 1e20;
       tau *= opt.barrier_growth) {
    // Damped Newton centering on tau (<linear, q> + sum w_c s_c) + barriers.
    center_epigraphs(tau);
    while (iter < opt.max_iters) {
      Vector gz = Vector::Zero(nz);
      Matrix hz = Matrix::Zero(nz, nz);
      ball.add_derivatives(z, gz, hz);
      gz.head(n) += tau * linear;
      Vector gs(static_cast<Eigen::Index>(cones)), ds(static_cast<Eigen::Index>(cones));
      std::vector<Vector> hqs(cones);
      for (std::size_t c = 0; c < cones; ++c) {
        const Vector u = cone_maps[c].transpose() * z.head(n);
        const Vector mu_vec = cone_maps[c] * u;
        const double psi = cone_slack(c, z.head(n), s[c]);
        gz.head(n) += 2.0 * mu_vec / psi;
        hz.topLeftCorner(n, n) += 4.0 * mu_vec * mu_vec.transpose() / (psi * psi) +
                                  2.0 * cone_maps[c] * cone_maps[c].transpose() / psi;
        gs[c] = tau * cone_weights[c] - 2.0 * s[c] / psi;
        hqs[c] = -4.0 * s[c] * mu_vec / (psi * psi);
        ds[c] = 4.0 * s[c] * s[c] / (psi * psi) - 2.0 / psi;
      }
      Matrix schur = hz;
      Vector rhs = -gz;
      for (std::size_t c = 0; c < cones; ++c) {
        schur.topLeftCorner(n, n) -= hqs[c] * hqs[c].transpose() / ds[c];
        rhs.head(n) += hqs[c] * (gs[c] / ds[c]);
      }
      const Vector step_z = schur.ldlt().solve(rhs);
      Vector step_s(static_cast<Eigen::Index>(cones));
      for (std::size_t c = 0; c < cones; ++c) {
        step_s[c] = -(gs[c] + hqs[c].dot(step_z.head(n))) / ds[c];
      }
      const double decrement_sq = -(gz.dot(step_z) + gs.dot(step_s));
      if (!step_z.allFinite() || !step_s.allFinite() || !(decrement_sq > 0.0)) break;
      const double decrement = std::sqrt(decrement_sq);
      ++iter;
      double alpha = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
      // Rounding can still push a long step out; shorten until strictly inside.
      for (; alpha > 1e-16; alpha *= opt.backtrack) {
        const Vector nz_trial = z + alpha * step_z;
        if (!ball.interior(nz_trial)) continue;
        bool inside = true;
        for (std::size_t c = 0; c < cones && inside; ++c) {
          const double sc = s[c] + alpha * step_s[c];
          inside = sc > 0.0 && cone_slack(c, nz_trial.head(n), sc) > 0.0;
        }
        if (inside) break;
      }
      if (!(alpha > 1e-16)) break;
      z += alpha * step_z;
      s += alpha * step_s;
      if (decrement_sq < 1e-12) break;
    }
    q = z.head(n);
    current = evaluate(q, true);
    pg = projected_gradient(q, current.gradient);
    if (pg <= opt.grad_tol) break;
    // Try to finish on the face the barrier iterate points at.
    for (bool boundary : {true, false}) {
      const auto polished = detail::polish_on_face(
          region, q, boundary, [&](const Vector& point) { return evaluate(point, true, false); });
      if (!polished) continue;
      auto eval = evaluate(*polished, true);
      const double polished_pg = projected_gradient(*polished, eval.gradient);
      if (polished_pg < pg &&
          eval.value <= current.value + 1e-12 * (1.0 + std::abs(current.value))) {
        q = *polished;
        current = std::move(eval);
        pg = polished_pg;
      }
    }
  }

  const Vector p = q.cwiseProduct(inv_scale);
  const Vector gradient_p = current.gradient.cwiseProduct(scale);
  sol.iterations = iter;
  sol.p_tilde_star = p;
  sol.objective_at_star = current.value;
  sol.value = -current.value;
  sol.projected_gradient_norm = pg;
  sol.converged = pg <= opt.grad_tol;
  sol.certificate_gap = gradient_p.dot(p) + region.dual_ball_support(-gradient_p);
  return sol;
}

}  // namespace detail

// Minimizes the Hopf objective over the conjugate's domain (method above). A
// horizon of zero returns J(x0) directly.
//
// Where the control switches, the integrand has a kink (smoothed over a width
// of order mu) that a fixed Gauss rule only resolves to O(panel width), and
// the gradient of the objective (the integrated control) then carries an O(1)
// step. With split_at_switches the problem is re-solved on a grid with panel
// edges at the kinks of the current minimizer until they stop moving.
inline HopfSolution solve_hopf(const HopfProblem& problem,
                               const std::optional<Vector>& warm_start = std::nullopt,
                               std::shared_ptr<const NodeProducts> products = nullptr) {
  problem.validate();
  if (problem.horizon == 0.0) {
    const GoalRegion& region = problem.region;
    HopfSolution sol;
    sol.value = region.eval_implicit(problem.x0);
    sol.objective_at_star = -sol.value;
    sol.p_tilde_star = region.dual_ball_maximizer(problem.x0 - region.center());
    sol.converged = true;
    return sol;
  }
  HopfSolution sol = detail::solve_hopf_on(problem, warm_start, std::move(products));
  if (!problem.split_at_switches || !sol.converged) return sol;

  const double t = problem.horizon;
  std::vector<double> breaks;
  for (int round = 0; round < 4; ++round) {
    const std::vector<double> found = find_switch_times(problem.model, t, sol.p_tilde_star);
    if (found.empty()) break;
    if (found.size() == breaks.size()) {
      double moved = 0.0;
      for (std::size_t k = 0; k < found.size(); ++k) {
        moved = std::max(moved, std::abs(found[k] - breaks[k]));
      }
      if (moved <= 1e-9 * t) break;
    }
    auto refined = std::make_shared<const NodeProducts>(
        problem.model,
        QuadratureGrid::with_breaks(t, problem.quad_nodes, problem.quad_panels, found));
    HopfSolution next = detail::solve_hopf_on(problem, sol.p_tilde_star, std::move(refined));
    next.iterations += sol.iterations;
    next.evaluations += sol.evaluations;
    if (!next.converged) return next;
    sol = std::move(next);
    breaks = found;
    sol.switch_times = breaks;
  }
  return sol;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_HOPF_SOLVER_HPP_
