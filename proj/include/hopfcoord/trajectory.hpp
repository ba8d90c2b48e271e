#ifndef HOPFCOORD_TRAJECTORY_HPP_
#define HOPFCOORD_TRAJECTORY_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hopfcoord/coordinator.hpp"
#include "hopfcoord/errors.hpp"
#include "hopfcoord/hamiltonian.hpp"
#include "hopfcoord/linear_dynamics.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord {

inline constexpr int kDefaultTrajectorySteps = 200;
inline constexpr double kTerminalTolerance = 1e-2;
inline constexpr double kAdmissibilitySlack = 1e-9;
inline constexpr double kHamiltonianDriftTolerance = 1e-3;

// Optimal feedback-free control of one vehicle from its converged p-tilde*.
// Costate lambda(s) = e^{(t* - s) A^T} p-tilde*, control = grad of the
// smoothed dual norm at v = -B^T lambda(s).
class ControlLaw {
 public:
  ControlLaw(VehicleModel model, int vehicle, double t_star, Vector p_tilde_star,
             SmoothingConfig smoothing = {})
      : model_(std::move(model)), vehicle_(vehicle), t_star_(t_star),
        p_tilde_star_(std::move(p_tilde_star)), smoothing_(smoothing) {
    model_.check_state(p_tilde_star_, "ControlLaw");
    if (!(t_star >= 0.0) || !std::isfinite(t_star)) {
      throw InvalidArgument("ControlLaw: t* must be finite and >= 0");
    }
    smoothing_.validate();
    // The control switches at s where the integrand of the Hopf objective
    // kinks at time-to-go t* - s.
    for (double to_go : find_switch_times(model_, t_star_, p_tilde_star_)) {
      switch_times_.insert(switch_times_.begin(), t_star_ - to_go);
    }
  }

  const VehicleModel& model() const { return model_; }
  int vehicle() const { return vehicle_; }
  double t_star() const { return t_star_; }
  const Vector& p_tilde_star() const { return p_tilde_star_; }
  const SmoothingConfig& smoothing() const { return smoothing_; }
  // Ascending times in (0, t*) where the control turns abruptly.
  const std::vector<double>& switch_times() const { return switch_times_; }

  Vector costate_at(double s) const {
    check_time(s, "costate_at");
    if (s == t_star_) return p_tilde_star_;
    return mat_exp(model_.a().transpose(), t_star_ - s) * p_tilde_star_;
  }

  Vector optimal_control(double s) const {
    check_time(s, "optimal_control");
    const Vector v = -model_.b().transpose() * costate_at(s);
    return smoothed_dual_norm_gradient(v, model_.control_norm(), smoothing_.mu);
  }

  // Hamiltonian -(A x) . lambda + |-B^T lambda|_* along the trajectory.
  double hamiltonian(const Vector& x, double s) const {
    return vehicle_hamiltonian(model_, x, costate_at(s), smoothing_);
  }

 private:
  void check_time(double s, const char* where) const {
    // RK4 stages land exactly on the endpoints; allow rounding at t*.
    if (!(s >= 0.0) || s > t_star_ * (1.0 + 1e-14)) {
      throw InvalidArgument(std::string(where) + ": s = " + std::to_string(s) +
                            " outside [0, " + std::to_string(t_star_) + "]");
    }
  }

  VehicleModel model_;
  int vehicle_;
  double t_star_;
  Vector p_tilde_star_;
  SmoothingConfig smoothing_;
  std::vector<double> switch_times_;
};

struct SampledTrajectory {
  int vehicle = 0;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> controls;
  std::vector<Vector> costates;
};

// Classic RK4 on x' = A x + B alpha*(s) with `steps` uniform steps. Near a
// switch the smoothed control reverses over a window of width about
// mu / |v'|, which a fixed step cannot resolve, so a step containing a switch
// is integrated adaptively (RK4 with step doubling) instead.
inline SampledTrajectory integrate_trajectory(const VehicleModel& model, const Vector& x0,
                                              const ControlLaw& law,
                                              int steps = kDefaultTrajectorySteps) {
  if (steps < 2) throw InvalidArgument("integrate_trajectory: need at least 2 steps");
  model.check_state(x0, "integrate_trajectory");
  const double horizon = law.t_star();
  const double h = horizon / steps;
  auto rhs = [&](double s, const Vector& x) -> Vector {
    return model.a() * x + model.b() * law.optimal_control(std::min(s, horizon));
  };
  auto rk4 = [&](double s, double dt, const Vector& x) -> Vector {
    const Vector k1 = rhs(s, x);
    const Vector k2 = rhs(s + 0.5 * dt, x + 0.5 * dt * k1);
    const Vector k3 = rhs(s + 0.5 * dt, x + 0.5 * dt * k2);
    const Vector k4 = rhs(s + dt, x + dt * k3);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto adaptive = [&](double from, double to, Vector x) -> Vector {
    double at = from;
    double dt = (to - from) / 8.0;
    const double floor = 1e-14 * std::max(1.0, horizon);
    while (at < to) {
      dt = std::min(dt, to - at);
      const Vector whole = rk4(at, dt, x);
      const Vector halves = rk4(at + 0.5 * dt, 0.5 * dt, rk4(at, 0.5 * dt, x));
      const double err = (whole - halves).lpNorm<Eigen::Infinity>() / 15.0;
      if (err <= 1e-13 * (1.0 + x.lpNorm<Eigen::Infinity>()) || dt <= floor) {
        x = halves + (halves - whole) / 15.0;
        at = dt == to - at ? to : at + dt;
        dt *= 2.0;
      } else {
        dt *= 0.5;
      }
    }
    return x;
  };
  const std::vector<double>& switches = law.switch_times();
  auto next_switch = switches.begin();
  SampledTrajectory out;
  out.vehicle = law.vehicle();
  Vector x = x0;
  for (int k = 0; k <= steps; ++k) {
    const double s = k == steps ? horizon : k * h;
    out.times.push_back(s);
    out.states.push_back(x);
    out.controls.push_back(law.optimal_control(s));
    out.costates.push_back(law.costate_at(s));
    if (k == steps) break;
    const double end = k + 1 == steps ? horizon : (k + 1) * h;
    bool straddles = false;
    for (; next_switch != switches.end() && *next_switch < end; ++next_switch) {
      straddles = straddles || *next_switch > s;
    }
    x = straddles ? adaptive(s, end, x) : rk4(s, end - s, x);
    if (!x.allFinite()) {
      throw NumericalFailure("integrate_trajectory: non-finite state for vehicle " +
                             std::to_string(law.vehicle() + 1) + " at s = " +
                             std::to_string(s + h));
    }
  }
  return out;
}

// Control laws of the assigned pairs of a converged result.
inline std::vector<ControlLaw> control_laws(const CoordinationProblem& problem,
                                            const CoordinationResult& result) {
  std::vector<ControlLaw> laws;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    laws.emplace_back(problem.joint.vehicle(i), static_cast<int>(i), result.t_star,
                      result.p_tilde_star.at(i), problem.settings.smoothing);
  }
  return laws;
}

inline std::vector<SampledTrajectory> integrate_all(const CoordinationProblem& problem,
                                                    const CoordinationResult& result,
                                                    int steps = kDefaultTrajectorySteps) {
  std::vector<SampledTrajectory> out;
  for (const auto& law : control_laws(problem, result)) {
    out.push_back(integrate_trajectory(problem.joint.vehicle(law.vehicle()),
                                       problem.initial_states[law.vehicle()], law, steps));
  }
  return out;
}

struct VehicleCheck {
  int vehicle = 0;
  int goal = 0;
  double terminal_implicit = 0.0;  // J_{i, sigma(i)}(gamma_i(t*))
  double max_control_norm = 0.0;
  double hamiltonian_drift = 0.0;  // max |H(s) - H(0)| / max(|H(0)|, 1e-12)
  bool terminal_ok = false;
  bool admissible = false;
  bool hamiltonian_ok = false;
  bool passed() const { return terminal_ok && admissible && hamiltonian_ok; }
};

struct ValidationReport {
  std::vector<VehicleCheck> vehicles;
  std::vector<SampledTrajectory> trajectories;
  bool passed() const {
    return std::all_of(vehicles.begin(), vehicles.end(),
                       [](const VehicleCheck& c) { return c.passed(); });
  }
  std::string summary() const {
    std::string out;
    for (const auto& c : vehicles) {
      out += "vehicle " + std::to_string(c.vehicle + 1) + " -> goal " +
             std::to_string(c.goal + 1) + ": J = " + std::to_string(c.terminal_implicit) +
             (c.terminal_ok ? " ok" : " FAIL") +
             ", max |u| = " + std::to_string(c.max_control_norm) +
             (c.admissible ? " ok" : " FAIL") +
             ", H drift = " + std::to_string(c.hamiltonian_drift) +
             (c.hamiltonian_ok ? " ok" : " FAIL") + "\n";
    }
    return out;
  }
};

// Integrates every assigned vehicle and checks terminal membership, control
// admissibility and conservation of the Hamiltonian. Failures are reported,
// not thrown.
inline ValidationReport validate_solution(const CoordinationProblem& problem,
                                          const CoordinationResult& result,
                                          int steps = kDefaultTrajectorySteps) {
  ValidationReport report;
  const auto laws = control_laws(problem, result);
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const ControlLaw& law = laws[i];
    const VehicleModel& model = problem.joint.vehicle(i);
    SampledTrajectory traj = integrate_trajectory(model, problem.initial_states[i], law, steps);
    VehicleCheck check;
    check.vehicle = static_cast<int>(i);
    check.goal = result.sigma_star.at(i);
    check.terminal_implicit =
        problem.goals[i][static_cast<std::size_t>(check.goal)].eval_implicit(traj.states.back());
    check.terminal_ok = check.terminal_implicit <= kTerminalTolerance;
    for (const auto& u : traj.controls) {
      check.max_control_norm = std::max(check.max_control_norm, norm(u, model.control_norm()));
    }
    check.admissible = check.max_control_norm <= 1.0 + kAdmissibilitySlack;
    const double h0 = law.hamiltonian(traj.states.front(), traj.times.front());
    const double scale = std::max(std::abs(h0), 1e-12);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double drift = std::abs(law.hamiltonian(traj.states[k], traj.times[k]) - h0) / scale;
      check.hamiltonian_drift = std::max(check.hamiltonian_drift, drift);
    }
    check.hamiltonian_ok = check.hamiltonian_drift <= kHamiltonianDriftTolerance;
    report.vehicles.push_back(check);
    report.trajectories.push_back(std::move(traj));
  }
  return report;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_TRAJECTORY_HPP_
