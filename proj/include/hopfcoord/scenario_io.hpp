#ifndef HOPFCOORD_SCENARIO_IO_HPP_
#define HOPFCOORD_SCENARIO_IO_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopfcoord/coordinator.hpp"
#include "hopfcoord/errors.hpp"
#include "hopfcoord/goal_model.hpp"
#include "hopfcoord/linear_dynamics.hpp"

namespace hopfcoord {

inline constexpr int kScenarioFormatVersion = 1;

struct VehicleSpec {
  std::string label;
  int state_dim = 0;
  int control_dim = 0;
  std::vector<double> a;  // row-major state_dim x state_dim
  std::vector<double> b;  // row-major state_dim x control_dim
  NormKind control_norm = NormKind::kTwo;
  bool operator==(const VehicleSpec&) const = default;
};

// A goal is given by a position center that is zero-padded into each
// vehicle's state, or by a full-state center. With rest_radius the trailing
// (velocity) components get their own ball of that radius.
struct GoalSpec {
  std::string label;
  std::vector<double> center;
  double radius = 0.0;
  NormKind norm = NormKind::kTwo;
  std::optional<double> rest_radius;
  std::optional<std::vector<double>> full_center;
  bool operator==(const GoalSpec&) const = default;
};

struct SweepAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool operator==(const SweepAxis&) const = default;
};

// Grid over the joint initial state (one axis per joint component) and the
// horizons at which phi is sampled.
struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::vector<double> times;
  bool operator==(const SweepSpec&) const = default;
};

struct Scenario {
  int format_version = kScenarioFormatVersion;
  std::string name;
  std::vector<VehicleSpec> vehicles;
  std::vector<GoalSpec> goals;
  std::vector<std::vector<double>> initial_states;
  SolverSettings solver{};
  std::optional<SweepSpec> sweep;
  bool operator==(const Scenario&) const = default;
};

namespace detail {

using nlohmann::json;

inline std::string describe(const json& value) {
  switch (value.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "a boolean";
    case json::value_t::string: return "a string";
    case json::value_t::array: return "an array";
    case json::value_t::object: return "an object";
    default: return "a number";
  }
}

// Collects every problem in the document instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back(path + ": " + message);
  }

  bool expect_object(const json& value, const std::string& path,
                     std::initializer_list<std::string_view> allowed) {
    if (!value.is_object()) {
      fail(path, "expected an object, got " + describe(value));
      return false;
    }
    for (const auto& [key, unused] : value.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(path + "." + key, "unknown field");
      }
    }
    return true;
  }

  const json* field(const json& object, const std::string& path, const char* key,
                    bool required) {
    auto it = object.find(key);
    if (it == object.end()) {
      if (required) fail(path + "." + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& value, const std::string& path) {
    if (!value.is_number()) {
      fail(path, "expected a number, got " + describe(value));
      return std::nullopt;
    }
    const double x = value.get<double>();
    if (!std::isfinite(x)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
      fail(path, "expected an integer, got " + describe(value));
      return std::nullopt;
    }
    return value.get<int>();
  }

  std::optional<std::string> string(const json& value, const std::string& path) {
    if (!value.is_string()) {
      fail(path, "expected a string, got " + describe(value));
      return std::nullopt;
    }
    return value.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& value, const std::string& path) {
    if (!value.is_array()) {
      fail(path, "expected an array of numbers, got " + describe(value));
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t k = 0; k < value.size(); ++k) {
      const auto x = number(value[k], path + "[" + std::to_string(k) + "]");
      ok = ok && x.has_value();
      out.push_back(x.value_or(0.0));
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<NormKind> norm_kind(const json& value, const std::string& path) {
    const auto name = string(value, path);
    if (!name) return std::nullopt;
    if (*name == "two") return NormKind::kTwo;
    if (*name == "sup") return NormKind::kSup;
    fail(path, "unknown norm '" + *name + "' (expected 'two' or 'sup')");
    return std::nullopt;
  }

  template <typename T, typename Parse>
  void optional_field(const json& object, const std::string& path, const char* key, T& target,
                      Parse parse) {
    if (const json* v = field(object, path, key, false)) {
      if (auto parsed = parse(*v, path + "." + key)) target = *parsed;
    }
  }
};

inline std::pair<int, int> line_and_column(std::string_view text, std::size_t offset) {
  int line = 1, column = 1;
  for (std::size_t k = 0; k < std::min(offset, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline void read_vehicle(Reader& r, const json& v, const std::string& path, VehicleSpec& out) {
  if (!r.expect_object(v, path, {"label", "state_dim", "control_dim", "A", "B", "control_norm"})) {
    return;
  }
  if (const json* x = r.field(v, path, "label", false)) {
    out.label = r.string(*x, path + ".label").value_or("");
  }
  if (const json* x = r.field(v, path, "state_dim", true)) {
    out.state_dim = r.integer(*x, path + ".state_dim").value_or(0);
    if (out.state_dim < 1) r.fail(path + ".state_dim", "must be >= 1");
  }
  if (const json* x = r.field(v, path, "control_dim", true)) {
    out.control_dim = r.integer(*x, path + ".control_dim").value_or(0);
    if (out.control_dim < 1) r.fail(path + ".control_dim", "must be >= 1");
  }
  if (const json* x = r.field(v, path, "A", true)) {
    out.a = r.numbers(*x, path + ".A").value_or(std::vector<double>{});
  }
  if (const json* x = r.field(v, path, "B", true)) {
    out.b = r.numbers(*x, path + ".B").value_or(std::vector<double>{});
  }
  if (const json* x = r.field(v, path, "control_norm", true)) {
    out.control_norm = r.norm_kind(*x, path + ".control_norm").value_or(NormKind::kTwo);
  }
  const auto n = static_cast<std::size_t>(std::max(out.state_dim, 0));
  const auto m = static_cast<std::size_t>(std::max(out.control_dim, 0));
  if (n > 0 && out.a.size() != n * n) {
    r.fail(path + ".A", "expected " + std::to_string(n * n) + " entries (" + std::to_string(n) +
                            " x " + std::to_string(n) + " row-major), got " +
                            std::to_string(out.a.size()));
  }
  if (n > 0 && m > 0 && out.b.size() != n * m) {
    r.fail(path + ".B", "expected " + std::to_string(n * m) + " entries (" + std::to_string(n) +
                            " x " + std::to_string(m) + " row-major), got " +
                            std::to_string(out.b.size()));
  }
}

inline void read_goal(Reader& r, const json& g, const std::string& path, GoalSpec& out) {
  if (!r.expect_object(g, path,
                       {"label", "center", "radius", "norm", "rest_radius", "full_center"})) {
    return;
  }
  if (const json* x = r.field(g, path, "label", false)) {
    out.label = r.string(*x, path + ".label").value_or("");
  }
  if (const json* x = r.field(g, path, "center", true)) {
    out.center = r.numbers(*x, path + ".center").value_or(std::vector<double>{});
    if (out.center.empty() && x->is_array()) r.fail(path + ".center", "must not be empty");
  }
  if (const json* x = r.field(g, path, "radius", true)) {
    out.radius = r.number(*x, path + ".radius").value_or(1.0);
    if (!(out.radius > 0.0)) r.fail(path + ".radius", "must be positive");
  }
  r.optional_field(g, path, "norm", out.norm,
                   [&](const json& v, const std::string& p) { return r.norm_kind(v, p); });
  if (const json* x = r.field(g, path, "rest_radius", false)) {
    out.rest_radius = r.number(*x, path + ".rest_radius");
    if (out.rest_radius && !(*out.rest_radius > 0.0)) {
      r.fail(path + ".rest_radius", "must be positive");
    }
  }
  if (const json* x = r.field(g, path, "full_center", false)) {
    out.full_center = r.numbers(*x, path + ".full_center");
  }
}

inline void read_solver(Reader& r, const json& s, const std::string& path, SolverSettings& out) {
  if (!r.expect_object(s, path,
                       {"t0", "epsilon", "max_newton_iters", "t_max", "quad_nodes", "quad_panels",
                        "mu", "newton_derivative", "threads", "optimizer"})) {
    return;
  }
  auto num = [&](const json& v, const std::string& p) { return r.number(v, p); };
  auto integer = [&](const json& v, const std::string& p) { return r.integer(v, p); };
  r.optional_field(s, path, "t0", out.t0, num);
  r.optional_field(s, path, "epsilon", out.epsilon, num);
  r.optional_field(s, path, "max_newton_iters", out.max_newton_iters, integer);
  r.optional_field(s, path, "t_max", out.t_max, num);
  r.optional_field(s, path, "quad_nodes", out.quad_nodes, integer);
  r.optional_field(s, path, "quad_panels", out.quad_panels, integer);
  r.optional_field(s, path, "mu", out.smoothing.mu, num);
  r.optional_field(s, path, "threads", out.threads, integer);
  if (const json* x = r.field(s, path, "newton_derivative", false)) {
    if (auto name = r.string(*x, path + ".newton_derivative")) {
      try {
        out.newton_derivative = newton_derivative_from_string(*name);
      } catch (const InvalidArgument& e) {
        r.fail(path + ".newton_derivative", e.what());
      }
    }
  }
  if (const json* o = r.field(s, path, "optimizer", false)) {
    const std::string op = path + ".optimizer";
    if (r.expect_object(*o, op, {"max_iters", "grad_tol", "sufficient_decrease", "backtrack",
                                 "barrier_growth"})) {
      r.optional_field(*o, op, "max_iters", out.optimizer.max_iters, integer);
      r.optional_field(*o, op, "grad_tol", out.optimizer.grad_tol, num);
      r.optional_field(*o, op, "sufficient_decrease", out.optimizer.sufficient_decrease, num);
      r.optional_field(*o, op, "backtrack", out.optimizer.backtrack, num);
      r.optional_field(*o, op, "barrier_growth", out.optimizer.barrier_growth, num);
    }
  }
  try {
    out.validate();
  } catch (const InvalidArgument& e) {
    r.fail(path, e.what());
  }
}

inline void read_sweep(Reader& r, const json& s, const std::string& path, SweepSpec& out) {
  if (!r.expect_object(s, path, {"axes", "times"})) return;
  if (const json* axes = r.field(s, path, "axes", true)) {
    if (!axes->is_array()) {
      r.fail(path + ".axes", "expected an array, got " + describe(*axes));
    } else {
      for (std::size_t k = 0; k < axes->size(); ++k) {
        const std::string ap = path + ".axes[" + std::to_string(k) + "]";
        SweepAxis axis;
        if (r.expect_object((*axes)[k], ap, {"min", "max", "count"})) {
          if (const json* x = r.field((*axes)[k], ap, "min", true)) {
            axis.min = r.number(*x, ap + ".min").value_or(0.0);
          }
          if (const json* x = r.field((*axes)[k], ap, "max", true)) {
            axis.max = r.number(*x, ap + ".max").value_or(0.0);
          }
          if (const json* x = r.field((*axes)[k], ap, "count", true)) {
            axis.count = r.integer(*x, ap + ".count").value_or(0);
          }
          if (!(axis.max > axis.min)) r.fail(ap, "max must exceed min");
          if (axis.count < 2) r.fail(ap + ".count", "must be >= 2");
        }
        out.axes.push_back(axis);
      }
    }
  }
  // Either an explicit list or {"start", "stop", "count"} (inclusive ends).
  if (const json* times = r.field(s, path, "times", true)) {
    const std::string tp = path + ".times";
    if (times->is_object()) {
      if (r.expect_object(*times, tp, {"start", "stop", "count"})) {
        double start = 0.0, stop = 0.0;
        int count = 0;
        if (const json* x = r.field(*times, tp, "start", true)) {
          start = r.number(*x, tp + ".start").value_or(0.0);
        }
        if (const json* x = r.field(*times, tp, "stop", true)) {
          stop = r.number(*x, tp + ".stop").value_or(0.0);
        }
        if (const json* x = r.field(*times, tp, "count", true)) {
          count = r.integer(*x, tp + ".count").value_or(0);
        }
        if (count < 0) r.fail(tp + ".count", "must be >= 0");
        for (int k = 0; k < count; ++k) {
          out.times.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
        }
      }
    } else {
      out.times = r.numbers(*times, tp).value_or(std::vector<double>{});
    }
    for (double t : out.times) {
      if (t < 0.0) {
        r.fail(tp, "times must be >= 0");
        break;
      }
    }
  }
}

}  // namespace detail

// Semantic checks that need the whole document: counts and dimensions, plus
// the model constructors' own checks (e.g. unstable A).
inline void check_scenario(const Scenario& s, std::vector<std::string>& errors) {
  if (s.format_version != kScenarioFormatVersion) {
    errors.push_back("format_version: unsupported version " + std::to_string(s.format_version) +
                     " (expected " + std::to_string(kScenarioFormatVersion) + ")");
  }
  const std::size_t n = s.vehicles.size();
  if (n == 0) errors.push_back("vehicles: at least one vehicle is required");
  if (s.goals.size() != n || s.initial_states.size() != n) {
    errors.push_back("count mismatch: " + std::to_string(n) + " vehicles, " +
                     std::to_string(s.goals.size()) + " goals, " +
                     std::to_string(s.initial_states.size()) +
                     " initial states (one goal and one initial state per vehicle)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const VehicleSpec& v = s.vehicles[i];
    const std::string path = "vehicles[" + std::to_string(i) + "]";
    const auto dim = static_cast<std::size_t>(std::max(v.state_dim, 0));
    if (v.a.size() == dim * dim && v.b.size() == dim * static_cast<std::size_t>(
                                                       std::max(v.control_dim, 0)) &&
        dim > 0 && v.control_dim > 0) {
      try {
        Matrix a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(v.a.data(), v.state_dim,
                                                                    v.state_dim);
        Matrix b = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(v.b.data(), v.state_dim,
                                                                    v.control_dim);
        VehicleModel(a, b, v.control_norm, v.label);
      } catch (const Error& e) {
        errors.push_back(path + ": " + e.what());
      }
    }
    if (i < s.initial_states.size() && s.initial_states[i].size() != dim) {
      errors.push_back("initial_states[" + std::to_string(i) + "]: expected " +
                       std::to_string(dim) + " components for vehicle " + std::to_string(i + 1) +
                       ", got " + std::to_string(s.initial_states[i].size()));
    }
    for (std::size_t j = 0; j < s.goals.size(); ++j) {
      const GoalSpec& g = s.goals[j];
      const std::string gp = "goals[" + std::to_string(j) + "]";
      if (g.full_center) {
        if (g.full_center->size() != dim) {
          errors.push_back(gp + ".full_center: expected " + std::to_string(dim) +
                           " components to fit vehicle " + std::to_string(i + 1) + ", got " +
                           std::to_string(g.full_center->size()));
        }
      } else if (g.center.size() > dim) {
        errors.push_back(gp + ".center: " + std::to_string(g.center.size()) +
                         " components do not fit vehicle " + std::to_string(i + 1) +
                         " with state dimension " + std::to_string(dim));
      }
      if (g.rest_radius && g.center.size() >= dim) {
        errors.push_back(gp + ".rest_radius: vehicle " + std::to_string(i + 1) +
                         " has no components beyond the center's " +
                         std::to_string(g.center.size()));
      }
    }
  }
  if (s.sweep) {
    std::size_t joint = 0;
    for (const auto& v : s.vehicles) joint += static_cast<std::size_t>(std::max(v.state_dim, 0));
    if (s.sweep->axes.size() != joint) {
      errors.push_back("sweep.axes: expected one axis per joint state component (" +
                       std::to_string(joint) + "), got " +
                       std::to_string(s.sweep->axes.size()));
    }
  }
}

// Parses and validates a scenario document. Throws ValidationError listing
// every problem found; syntax errors carry line and column.
inline Scenario parse_scenario(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ValidationError({"syntax error at line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + e.what()});
  }
  detail::Reader r;
  Scenario s;
  if (r.expect_object(doc, "scenario",
                      {"format_version", "name", "vehicles", "goals", "initial_states", "solver",
                       "sweep"})) {
    if (const json* x = r.field(doc, "scenario", "format_version", true)) {
      s.format_version = r.integer(*x, "format_version").value_or(-1);
    }
    if (const json* x = r.field(doc, "scenario", "name", false)) {
      s.name = r.string(*x, "name").value_or("");
    }
    if (const json* x = r.field(doc, "scenario", "vehicles", true)) {
      if (!x->is_array()) {
        r.fail("vehicles", "expected an array, got " + detail::describe(*x));
      } else {
        s.vehicles.resize(x->size());
        for (std::size_t k = 0; k < x->size(); ++k) {
          detail::read_vehicle(r, (*x)[k], "vehicles[" + std::to_string(k) + "]", s.vehicles[k]);
        }
      }
    }
    if (const json* x = r.field(doc, "scenario", "goals", true)) {
      if (!x->is_array()) {
        r.fail("goals", "expected an array, got " + detail::describe(*x));
      } else {
        s.goals.resize(x->size());
        for (std::size_t k = 0; k < x->size(); ++k) {
          detail::read_goal(r, (*x)[k], "goals[" + std::to_string(k) + "]", s.goals[k]);
        }
      }
    }
    if (const json* x = r.field(doc, "scenario", "initial_states", true)) {
      if (!x->is_array()) {
        r.fail("initial_states", "expected an array, got " + detail::describe(*x));
      } else {
        for (std::size_t k = 0; k < x->size(); ++k) {
          s.initial_states.push_back(
              r.numbers((*x)[k], "initial_states[" + std::to_string(k) + "]")
                  .value_or(std::vector<double>{}));
        }
      }
    }
    if (const json* x = r.field(doc, "scenario", "solver", false)) {
      detail::read_solver(r, *x, "solver", s.solver);
    }
    if (const json* x = r.field(doc, "scenario", "sweep", false)) {
      s.sweep.emplace();
      detail::read_sweep(r, *x, "sweep", *s.sweep);
    }
  }
  if (r.errors.empty()) check_scenario(s, r.errors);
  if (!r.errors.empty()) throw ValidationError(std::move(r.errors));
  return s;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return buffer.str();
}

inline Scenario load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_scenario(text);
  } catch (const ValidationError& e) {
    std::vector<std::string> messages;
    for (const auto& m : e.messages()) messages.push_back(path + ": " + m);
    throw ValidationError(std::move(messages));
  }
}

// Canonical document: every field written, including solver defaults.
inline std::string serialize_scenario(const Scenario& s) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["format_version"] = s.format_version;
  doc["name"] = s.name;
  doc["vehicles"] = ordered_json::array();
  for (const auto& v : s.vehicles) {
    ordered_json j;
    j["label"] = v.label;
    j["state_dim"] = v.state_dim;
    j["control_dim"] = v.control_dim;
    j["A"] = v.a;
    j["B"] = v.b;
    j["control_norm"] = std::string(to_string(v.control_norm));
    doc["vehicles"].push_back(j);
  }
  doc["goals"] = ordered_json::array();
  for (const auto& g : s.goals) {
    ordered_json j;
    j["label"] = g.label;
    j["center"] = g.center;
    j["radius"] = g.radius;
    j["norm"] = std::string(to_string(g.norm));
    if (g.rest_radius) j["rest_radius"] = *g.rest_radius;
    if (g.full_center) j["full_center"] = *g.full_center;
    doc["goals"].push_back(j);
  }
  doc["initial_states"] = s.initial_states;
  const SolverSettings& c = s.solver;
  ordered_json solver;
  solver["t0"] = c.t0;
  solver["epsilon"] = c.epsilon;
  solver["max_newton_iters"] = c.max_newton_iters;
  solver["t_max"] = c.t_max;
  solver["quad_nodes"] = c.quad_nodes;
  solver["quad_panels"] = c.quad_panels;
  solver["mu"] = c.smoothing.mu;
  solver["newton_derivative"] = to_string(c.newton_derivative);
  solver["threads"] = c.threads;
  solver["optimizer"] = {{"max_iters", c.optimizer.max_iters},
                         {"grad_tol", c.optimizer.grad_tol},
                         {"sufficient_decrease", c.optimizer.sufficient_decrease},
                         {"backtrack", c.optimizer.backtrack},
                         {"barrier_growth", c.optimizer.barrier_growth}};
  doc["solver"] = solver;
  if (s.sweep) {
    ordered_json sweep;
    sweep["axes"] = ordered_json::array();
    for (const auto& a : s.sweep->axes) {
      sweep["axes"].push_back({{"min", a.min}, {"max", a.max}, {"count", a.count}});
    }
    sweep["times"] = s.sweep->times;
    doc["sweep"] = sweep;
  }
  return doc.dump(2) + "\n";
}

inline VehicleModel make_vehicle(const VehicleSpec& v) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return VehicleModel(Eigen::Map<const RowMajor>(v.a.data(), v.state_dim, v.state_dim),
                      Eigen::Map<const RowMajor>(v.b.data(), v.state_dim, v.control_dim),
                      v.control_norm, v.label);
}

// Goal j expressed in the state space of a vehicle with `state_dim` states.
inline GoalRegion embed_goal(const GoalSpec& g, int state_dim) {
  const auto split = static_cast<Eigen::Index>(g.center.size());
  if (split > state_dim || (g.full_center && std::ssize(*g.full_center) != state_dim)) {
    throw DimensionMismatch("goal '" + g.label + "' does not fit a state of dimension " +
                            std::to_string(state_dim));
  }
  if (g.rest_radius && split >= state_dim) {
    throw InvalidArgument("goal '" + g.label + "': rest_radius needs state components beyond the center");
  }
  Vector center = Vector::Zero(state_dim);
  if (g.full_center) {
    center = Eigen::Map<const Vector>(g.full_center->data(),
                                      static_cast<Eigen::Index>(g.full_center->size()));
  } else {
    center.head(static_cast<Eigen::Index>(g.center.size())) =
        Eigen::Map<const Vector>(g.center.data(), static_cast<Eigen::Index>(g.center.size()));
  }
  if (!g.rest_radius) return GoalRegion(center, g.radius, g.norm, g.label);
  return GoalRegion(center, {{0, split, g.radius}, {split, state_dim - split, *g.rest_radius}},
                    g.norm, g.label);
}

inline CoordinationProblem make_problem(const Scenario& s) {
  std::vector<VehicleModel> vehicles;
  for (const auto& v : s.vehicles) vehicles.push_back(make_vehicle(v));
  CoordinationProblem problem{build_joint(vehicles), {}, {}, s.solver};
  for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
    std::vector<GoalRegion> row;
    for (const auto& g : s.goals) row.push_back(embed_goal(g, s.vehicles[i].state_dim));
    problem.goals.push_back(std::move(row));
    problem.initial_states.push_back(Eigen::Map<const Vector>(
        s.initial_states[i].data(), static_cast<Eigen::Index>(s.initial_states[i].size())));
  }
  problem.validate();
  return problem;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_SCENARIO_IO_HPP_
