#ifndef HOPFCOORD_COORDINATOR_HPP_
#define HOPFCOORD_COORDINATOR_HPP_

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hopfcoord/assignment.hpp"
#include "hopfcoord/errors.hpp"
#include "hopfcoord/goal_model.hpp"
#include "hopfcoord/hamiltonian.hpp"
#include "hopfcoord/hopf_solver.hpp"
#include "hopfcoord/linear_dynamics.hpp"

namespace hopfcoord {

// Which Hamiltonian the Newton step in t divides by.
enum class NewtonDerivative {
  kBottleneck,  // -H of the pair attaining the bottleneck
  kAlgorithm1,  // -sum_i H_i over the assigned pairs
};

inline std::string to_string(NewtonDerivative mode) {
  return mode == NewtonDerivative::kBottleneck ? "bottleneck" : "algorithm1";
}

inline NewtonDerivative newton_derivative_from_string(const std::string& text) {
  if (text == "bottleneck") return NewtonDerivative::kBottleneck;
  if (text == "algorithm1") return NewtonDerivative::kAlgorithm1;
  throw InvalidArgument("unknown newton derivative '" + text +
                        "' (expected 'bottleneck' or 'algorithm1')");
}

// Below this |H| the Newton step is not attempted.
inline constexpr double kMinNewtonSlope = 1e-12;

struct SolverSettings {
  double t0 = 1.0;
  double epsilon = 1e-5;
  int max_newton_iters = 50;
  double t_max = 1e3;
  int quad_nodes = 50;
  int quad_panels = 5;
  SmoothingConfig smoothing{};
  OptimizerConfig optimizer{};
  NewtonDerivative newton_derivative = NewtonDerivative::kBottleneck;
  int threads = 0;  // 0: HOPFCOORD_THREADS, else hardware concurrency

  bool operator==(const SolverSettings&) const = default;

  void validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw InvalidArgument("t0 must be positive");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (max_newton_iters < 1) throw InvalidArgument("max_newton_iters must be >= 1");
    if (!(t_max > t0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must exceed t0");
    if (quad_nodes < 1 || quad_panels < 1 || quad_nodes % quad_panels != 0) {
      throw InvalidArgument("quad_nodes must be a positive multiple of quad_panels");
    }
    if (threads < 0) throw InvalidArgument("threads must be >= 0");
    smoothing.validate();
    optimizer.validate();
  }
};

// N vehicles and N goals. goals[i][j] is goal j expressed in vehicle i's
// state space.
struct CoordinationProblem {
  JointModel joint;
  std::vector<std::vector<GoalRegion>> goals;
  std::vector<Vector> initial_states;
  SolverSettings settings{};

  std::size_t size() const { return joint.size(); }

  void validate() const {
    const std::size_t n = size();
    if (goals.size() != n || initial_states.size() != n) {
      throw InvalidArgument("coordination problem: " + std::to_string(n) + " vehicles, " +
                            std::to_string(goals.size()) + " goal rows, " +
                            std::to_string(initial_states.size()) + " initial states");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const VehicleModel& model = joint.vehicle(i);
      model.check_state(initial_states[i], "coordination problem initial state");
      if (goals[i].size() != n) {
        throw InvalidArgument("coordination problem: vehicle " + std::to_string(i + 1) +
                              " has " + std::to_string(goals[i].size()) + " goals, expected " +
                              std::to_string(n));
      }
      for (const auto& goal : goals[i]) {
        if (goal.dim() != model.state_dim()) {
          throw DimensionMismatch("goal '" + goal.label() + "' does not fit vehicle " +
                                  std::to_string(i + 1));
        }
      }
    }
    settings.validate();
  }

  HopfProblem pair_problem(std::size_t i, std::size_t j, double t) const {
    return HopfProblem{joint.vehicle(i), goals[i][j],        initial_states[i], t,
                       settings.quad_nodes, settings.quad_panels, settings.smoothing,
                       settings.optimizer};
  }
};

// Last p-tilde per (vehicle, goal), used to warm-start the next horizon.
class WarmStartCache {
 public:
  explicit WarmStartCache(std::size_t n = 0) : n_(n), slots_(n * n) {}
  std::size_t size() const { return n_; }
  const std::optional<Vector>& get(std::size_t i, std::size_t j) const {
    return slots_[i * n_ + j];
  }
  void put(std::size_t i, std::size_t j, Vector p) { slots_[i * n_ + j] = std::move(p); }

 private:
  std::size_t n_;
  std::vector<std::optional<Vector>> slots_;
};

struct JointValue {
  double t = 0.0;
  double phi = 0.0;
  CostMatrix values{Matrix::Zero(1, 1)};
  BottleneckResult assignment;
  std::vector<HopfSolution> pairs;  // row-major (vehicle, goal)
  int hopf_solves = 0;

  const HopfSolution& pair(std::size_t i, std::size_t j) const {
    const std::size_t n = assignment.sigma.size();
    return pairs[i * n + j];
  }
};

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HOPFCOORD_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(k) for k in [0, count) on up to `threads` workers.
template <typename Task>
void parallel_for(std::size_t count, int threads, const Task& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(threads));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) task(k);
    });
  }
  for (auto& th : pool) th.join();
}

// phi(x, t) = min over sigma of max_i phi_{i, sigma(i)}(x_i, t).
inline JointValue joint_value(const CoordinationProblem& problem, double t,
                              WarmStartCache* cache = nullptr) {
  problem.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("joint_value: t must be finite and >= 0, got " + std::to_string(t));
  }
  const std::size_t n = problem.size();
  if (cache != nullptr && cache->size() != n) *cache = WarmStartCache(n);

  // Node products depend on the vehicle and horizon only; goals share them.
  std::vector<std::shared_ptr<const NodeProducts>> products(n);
  if (t > 0.0) {
    const QuadratureGrid grid = QuadratureGrid::gauss_legendre(
        t, problem.settings.quad_nodes, problem.settings.quad_panels);
    for (std::size_t i = 0; i < n; ++i) {
      products[i] = std::make_shared<const NodeProducts>(problem.joint.vehicle(i), grid);
    }
  }

  JointValue out;
  out.t = t;
  out.pairs.resize(n * n);
  std::vector<std::exception_ptr> failures(n * n);
  std::atomic<int> solves{0};
  parallel_for(n * n, resolve_thread_count(problem.settings.threads), [&](std::size_t k) {
    const std::size_t i = k / n, j = k % n;
    try {
      std::optional<Vector> warm;
      if (cache != nullptr) warm = cache->get(i, j);
      HopfSolution sol = solve_hopf(problem.pair_problem(i, j, t), warm, products[i]);
      ++solves;
      if (!sol.converged) {
        throw SolverFailure(static_cast<int>(i), static_cast<int>(j),
                            "Hopf solve for vehicle " + std::to_string(i + 1) + ", goal " +
                                std::to_string(j + 1) + " at t = " + std::to_string(t) +
                                " did not converge (projected gradient " +
                                std::to_string(sol.projected_gradient_norm) + ")");
      }
      if (cache != nullptr) cache->put(i, j, sol.p_tilde_star);
      out.pairs[k] = std::move(sol);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  });
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  out.hopf_solves = solves.load();

  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = out.pairs[i * n + j].value;
  out.values = CostMatrix(q);
  out.assignment = solve_lbap(out.values);
  out.phi = out.assignment.bottleneck_value;
  return out;
}

inline bool is_reachable(const CoordinationProblem& problem, double t) {
  return joint_value(problem, t).phi <= 0.0;
}

// Per-vehicle Hamiltonian H_i(x_i, e^{tA_i^T} p-tilde*) of the pair (i, sigma(i)).
inline double assigned_hamiltonian(const CoordinationProblem& problem, const JointValue& value,
                                   std::size_t i) {
  const VehicleModel& model = problem.joint.vehicle(i);
  const HopfSolution& sol = value.pair(i, static_cast<std::size_t>(value.assignment.sigma[i]));
  const Vector p = mat_exp(model.a().transpose(), value.t) * sol.p_tilde_star;
  return vehicle_hamiltonian(model, problem.initial_states[i], p, problem.settings.smoothing);
}

// The H with d phi / dt = -H used by the Newton step.
inline double newton_hamiltonian(const CoordinationProblem& problem, const JointValue& value) {
  if (problem.settings.newton_derivative == NewtonDerivative::kBottleneck) {
    return assigned_hamiltonian(problem, value,
                                static_cast<std::size_t>(value.assignment.bottleneck_vehicle));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) total += assigned_hamiltonian(problem, value, i);
  return total;
}

enum class StepKind { kStart, kNewton, kBisection, kExpansion };

inline std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kStart: return "start";
    case StepKind::kNewton: return "newton";
    case StepKind::kBisection: return "bisection";
    case StepKind::kExpansion: return "expansion";
  }
  return "?";
}

struct IterationRecord {
  double t = 0.0;
  double phi = 0.0;
  double hamiltonian = 0.0;
  std::vector<int> sigma;
  StepKind kind = StepKind::kStart;  // how this t was chosen
  double bracket_lo = 0.0;           // after this evaluation
  double bracket_hi = std::numeric_limits<double>::infinity();
  bool assignment_switched = false;  // sigma differs from the previous iterate
};

struct CoordinationResult {
  double t_star = 0.0;
  std::vector<int> sigma_star;
  double phi_at_t_star = 0.0;
  int newton_iterations = 0;
  CostMatrix per_pair_values{Matrix::Zero(1, 1)};
  std::vector<Vector> p_tilde_star;  // per vehicle, for its assigned goal
  std::vector<IterationRecord> history;
  int hopf_solves = 0;
  JointValue final_value;
};

inline std::string format_history(const std::vector<IterationRecord>& history) {
  std::string out;
  for (const auto& rec : history) {
    out += "  t = " + std::to_string(rec.t) + "  phi = " + std::to_string(rec.phi) + "  (" +
           to_string(rec.kind) + ")\n";
  }
  return out;
}

// Smallest t with phi(x, t) = 0 by Newton steps t <- t + phi / H, safeguarded
// by a bracket [t_lo, t_hi] with phi(t_lo) > 0 >= phi(t_hi). Until a negative
// value is seen the bracket is open above and the iteration may only move
// right (doubling when Newton cannot).
inline CoordinationResult min_time_to_reach(const CoordinationProblem& problem) {
  problem.validate();
  const SolverSettings& cfg = problem.settings;
  CoordinationResult result;
  WarmStartCache cache(problem.size());

  auto finish = [&](JointValue value) {
    result.t_star = value.t;
    result.sigma_star = value.assignment.sigma;
    result.phi_at_t_star = value.phi;
    result.per_pair_values = value.values;
    result.p_tilde_star.clear();
    for (std::size_t i = 0; i < problem.size(); ++i) {
      result.p_tilde_star.push_back(
          value.pair(i, static_cast<std::size_t>(value.assignment.sigma[i])).p_tilde_star);
    }
    result.final_value = std::move(value);
    return result;
  };

  JointValue at_zero = joint_value(problem, 0.0);
  result.hopf_solves += at_zero.hopf_solves;
  if (at_zero.phi <= 0.0) return finish(std::move(at_zero));

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double t = cfg.t0;
  StepKind kind = StepKind::kStart;
  bool tried_t_max = false;
  for (int iter = 1; iter <= cfg.max_newton_iters; ++iter) {
    JointValue value = joint_value(problem, t, &cache);
    result.hopf_solves += value.hopf_solves;
    result.newton_iterations = iter;

    IterationRecord rec;
    rec.t = t;
    rec.phi = value.phi;
    rec.sigma = value.assignment.sigma;
    rec.kind = kind;
    rec.assignment_switched =
        !result.history.empty() && result.history.back().sigma != rec.sigma;
    rec.hamiltonian = newton_hamiltonian(problem, value);
    if (value.phi > 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
    rec.bracket_lo = lo;
    rec.bracket_hi = hi;
    result.history.push_back(rec);

    if (std::abs(value.phi) <= cfg.epsilon) return finish(std::move(value));

    if (std::isinf(hi) && tried_t_max) {
      throw UnreachableFormation("phi(x, t_max = " + std::to_string(cfg.t_max) + ") = " +
                                 std::to_string(value.phi) + " > 0; formation not reachable");
    }

    const double slope = rec.hamiltonian;
    const double newton = t + value.phi / slope;
    const bool newton_ok = std::abs(slope) >= kMinNewtonSlope && std::isfinite(newton) &&
                           newton > lo && newton < hi && newton <= cfg.t_max;
    if (newton_ok) {
      t = newton;
      kind = StepKind::kNewton;
    } else if (std::isfinite(hi)) {
      t = 0.5 * (lo + hi);
      kind = StepKind::kBisection;
    } else {
      t = std::min(2.0 * std::max(t, lo), cfg.t_max);
      tried_t_max = t >= cfg.t_max;
      kind = StepKind::kExpansion;
    }
  }
  throw NonConvergence("min_time_to_reach: |phi| > " + std::to_string(cfg.epsilon) +
                       " after " + std::to_string(cfg.max_newton_iters) +
                       " iterations; history:\n" + format_history(result.history));
}

// True if the LBAP assignment at t* +- delta equals sigma*.
inline bool assignment_stable_near(const CoordinationProblem& problem,
                                   const CoordinationResult& result, double delta = 1e-6) {
  for (double t : {result.t_star - delta, result.t_star + delta}) {
    if (t < 0.0) continue;
    if (joint_value(problem, t).assignment.sigma != result.sigma_star) return false;
  }
  return true;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_COORDINATOR_HPP_
