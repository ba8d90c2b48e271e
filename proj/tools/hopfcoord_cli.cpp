// Command-line front end: solve, value, assign, trajectory, sweep.
//
// Exit codes: 0 success, 1 invalid input (scenario, flags, files),
// 2 solver non-convergence or a failed trajectory check, 3 unreachable
// formation.

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hopfcoord/export.hpp"
#include "hopfcoord/oracle.hpp"
#include "hopfcoord/scenario_io.hpp"
#include "hopfcoord/sweep.hpp"
#include "hopfcoord/trajectory.hpp"

namespace {

using namespace hopfcoord;

enum ExitCode { kOk = 0, kInvalidInput = 1, kNotConverged = 2, kUnreachable = 3 };

struct Options {
  std::string scenario;
  std::string report;
  std::string format;  // empty: from the report extension
  std::optional<std::string> newton_derivative;
  std::optional<int> threads;
  std::optional<int> quad_nodes;
  std::optional<double> mu;
  double time = 0.0;
  bool oracle = false;
  std::string matrix;
  int steps = kDefaultTrajectorySteps;
};

ExportFormat report_format(const Options& o) {
  return o.format.empty() ? export_format_for_path(o.report) : export_format_from_string(o.format);
}

Scenario load_with_overrides(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.newton_derivative) s.solver.newton_derivative = newton_derivative_from_string(*o.newton_derivative);
  if (o.threads) s.solver.threads = *o.threads;
  if (o.quad_nodes) s.solver.quad_nodes = *o.quad_nodes;
  if (o.mu) s.solver.smoothing.mu = *o.mu;
  s.solver.validate();
  return s;
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += "  ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += fmt::format("{:>12.6f}", m(i, j));
    out += "\n";
  }
  return out;
}

std::string format_assignment(const std::vector<int>& sigma) {
  std::string out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    out += fmt::format("{}{}->{}", i ? ", " : "", i + 1, sigma[i] + 1);
  }
  return out;
}

// "out.csv" -> "out_v2.csv" for vehicle index 1.
std::string per_vehicle_path(const std::string& path, std::size_t vehicle) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.rfind('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  return stem + "_v" + std::to_string(vehicle + 1) + (has_ext ? path.substr(dot) : "");
}

int run_solve(const Options& o) {
  const Scenario scenario = load_with_overrides(o);
  const CoordinationResult r = min_time_to_reach(make_problem(scenario));
  std::cout << fmt::format("t* = {:.6f}\nassignment: {}\nphi(t*) = {:.3e}\n", r.t_star,
                           format_assignment(r.sigma_star), r.phi_at_t_star)
            << fmt::format("newton iterations: {}, hopf solves: {}\n", r.newton_iterations,
                           r.hopf_solves)
            << "iterations:\n"
            << format_history(r.history) << "per-pair values at t* (vehicle rows, goal columns):\n"
            << format_matrix(r.per_pair_values.values());
  if (!o.report.empty()) export_result(r, report_format(o), o.report);
  return kOk;
}

int run_value(const Options& o) {
  const Scenario scenario = load_with_overrides(o);
  const CoordinationProblem problem = make_problem(scenario);
  const JointValue v = joint_value(problem, o.time);
  std::cout << fmt::format("phi(x0, {}) = {:.9f}\nassignment: {}\nreachable: {}\n", o.time, v.phi,
                           format_assignment(v.assignment.sigma), v.phi <= 0.0 ? "yes" : "no")
            << "per-pair values (vehicle rows, goal columns):\n"
            << format_matrix(v.values.values());
  if (o.oracle) {
    // Analytic values exist only for drift-free scalar vehicles and intervals.
    double worst = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
      const VehicleModel& m = problem.joint.vehicle(i);
      if (m.state_dim() != 1 || m.control_dim() != 1 || !m.a().isZero(0.0)) {
        throw InvalidArgument("--oracle needs one-dimensional drift-free vehicles");
      }
      for (std::size_t j = 0; j < problem.size(); ++j) {
        const GoalRegion& g = problem.goals[i][j];
        const double exact = oracle::analytic_value_1d(std::abs(m.b()(0, 0)), g.center()[0],
                                                       g.radius(), problem.initial_states[i][0],
                                                       o.time);
        worst = std::max(worst, std::abs(exact - v.values(static_cast<int>(i), static_cast<int>(j))));
      }
    }
    std::cout << fmt::format("oracle: max |hopf - analytic| = {:.3e}\n", worst);
  }
  if (!o.report.empty()) {
    write_text_file(o.report, report_format(o) == ExportFormat::kJson
                                  ? to_json_text(joint_value_json(v))
                                  : "phi\n" + format_number(v.phi) + "\n");
  }
  return kOk;
}

CostMatrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("{}:{}: bad number '{}'", path, number, cell));
      }
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw InvalidArgument(fmt::format("{}: row {} has {} entries, expected {}", path, i + 1,
                                        rows[i].size(), rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return CostMatrix(m);
}

int run_assign(const Options& o) {
  const CostMatrix q = read_matrix_csv(o.matrix);
  const BottleneckResult r = solve_lbap(q);
  std::cout << fmt::format("assignment: {}\nbottleneck value: {}\nbottleneck vehicle: {}\n",
                           format_assignment(r.sigma), format_number(r.bottleneck_value),
                           r.bottleneck_vehicle + 1);
  if (!o.report.empty()) {
    nlohmann::ordered_json doc;
    doc["assignment"] = detail::assignment_json(r.sigma);
    doc["bottleneck_value"] = r.bottleneck_value;
    doc["bottleneck_vehicle"] = r.bottleneck_vehicle + 1;
    write_text_file(o.report, to_json_text(doc));
  }
  return kOk;
}

int run_trajectory(const Options& o) {
  const Scenario scenario = load_with_overrides(o);
  const CoordinationProblem problem = make_problem(scenario);
  const CoordinationResult result = min_time_to_reach(problem);
  const ValidationReport report = validate_solution(problem, result, o.steps);
  for (const auto& traj : report.trajectories) {
    if (o.report.empty()) {
      std::cout << "# vehicle " << traj.vehicle + 1 << "\n" << trajectory_csv(traj);
    } else {
      export_result(traj, report_format(o), per_vehicle_path(o.report, traj.vehicle));
    }
  }
  std::cerr << fmt::format("t* = {:.6f}, assignment: {}\n", result.t_star,
                           format_assignment(result.sigma_star))
            << report.summary();
  return report.passed() ? kOk : kNotConverged;
}

int run_sweep_command(const Options& o) {
  const Scenario scenario = load_with_overrides(o);
  const SweepResult sweep = run_sweep(scenario);
  if (o.report.empty()) {
    std::cout << sweep_csv(sweep);
    return kOk;
  }
  const ExportFormat format = report_format(o);
  export_result(sweep, format, o.report);
  if (format == ExportFormat::kCsv) {
    const auto dot = o.report.rfind('.');
    write_text_file(o.report.substr(0, dot) + "_contours.csv", contours_csv(sweep));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal multi-vehicle coordination via Hopf-formula level sets"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--report", o.report, "Write a report (format from the extension)");
    sub->add_option("--format", o.format, "Report format: csv or json");
    sub->add_option("--newton-derivative", o.newton_derivative, "bottleneck or algorithm1");
    sub->add_option("--threads", o.threads, "Worker threads (0: automatic)");
    sub->add_option("--quad-nodes", o.quad_nodes, "Quadrature nodes per Hopf integral");
    sub->add_option("--mu", o.mu, "Dual-norm smoothing");
  };

  CLI::App* solve = app.add_subcommand("solve", "Minimum formation time and assignment");
  add_common(solve);
  CLI::App* value = app.add_subcommand("value", "Joint value phi(x0, t)");
  add_common(value);
  value->add_option("--time", o.time, "Horizon t")->required();
  value->add_flag("--oracle", o.oracle, "Compare with the analytic 1-D values");
  CLI::App* assign = app.add_subcommand("assign", "Bottleneck assignment of a CSV matrix");
  assign->add_option("--matrix", o.matrix, "Square CSV matrix")->required()->check(CLI::ExistingFile);
  assign->add_option("--report", o.report, "Write the assignment as JSON");
  CLI::App* trajectory = app.add_subcommand("trajectory", "Optimal trajectories as CSV");
  add_common(trajectory);
  trajectory->add_option("--steps", o.steps, "Integration steps")->check(CLI::PositiveNumber);
  CLI::App* sweep = app.add_subcommand("sweep", "Zero level set sweep of the scenario");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidInput;
  }

  try {
    if (solve->parsed()) return run_solve(o);
    if (value->parsed()) return run_value(o);
    if (assign->parsed()) return run_assign(o);
    if (trajectory->parsed()) return run_trajectory(o);
    if (sweep->parsed()) return run_sweep_command(o);
  } catch (const UnreachableFormation& e) {
    std::cerr << "unreachable: " << e.what() << "\n";
    return kUnreachable;
  } catch (const NonConvergence& e) {
    std::cerr << "did not converge: " << e.what() << "\n";
    return kNotConverged;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kNotConverged;
  } catch (const DomainViolation& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kNotConverged;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNotConverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}
