#ifndef HOPFCOORD_EXPORT_HPP_
#define HOPFCOORD_EXPORT_HPP_

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hopfcoord/coordinator.hpp"
#include "hopfcoord/errors.hpp"
#include "hopfcoord/sweep.hpp"
#include "hopfcoord/trajectory.hpp"

namespace hopfcoord {

inline constexpr int kReportSchemaVersion = 1;

enum class ExportFormat { kCsv, kJson };

inline ExportFormat export_format_from_string(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw InvalidArgument("unknown export format '" + name + "' (expected 'csv' or 'json')");
}

// Format from the file extension; json unless the path ends in ".csv".
inline ExportFormat export_format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot != std::string::npos && path.substr(dot) == ".csv" ? ExportFormat::kCsv
                                                                : ExportFormat::kJson;
}

// 17 significant digits, '.' separator, locale independent. NaN or infinity
// in output is a bug.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) throw NumericalFailure("non-finite value in output");
  return fmt::format("{:.17g}", x);
}

namespace detail {

inline void write_json(const nlohmann::ordered_json& value, std::string& out, int depth) {
  using nlohmann::ordered_json;
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (value.type()) {
    case ordered_json::value_t::number_float:
      out += format_number(value.get<double>());
      return;
    case ordered_json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ordered_json(key).dump() + ": ";
        write_json(item, out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case ordered_json::value_t::array: {
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& item : value) flat = flat && !item.is_structured();
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        write_json(item, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    default:
      out += value.dump();
  }
}

inline nlohmann::ordered_json matrix_json(const Matrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::ordered_json vector_json(const Vector& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

// Assignments are written 1-based ("vehicle i goes to goal sigma[i]").
inline nlohmann::ordered_json assignment_json(const std::vector<int>& sigma) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (int g : sigma) out.push_back(g + 1);
  return out;
}

}  // namespace detail

inline std::string to_json_text(const nlohmann::ordered_json& value) {
  std::string out;
  detail::write_json(value, out, 0);
  return out + "\n";
}

inline nlohmann::ordered_json result_json(const CoordinationResult& r) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "hopfcoord.coordination_result";
  doc["schema_version"] = kReportSchemaVersion;
  doc["t_star"] = r.t_star;
  doc["assignment"] = detail::assignment_json(r.sigma_star);
  doc["phi_at_t_star"] = r.phi_at_t_star;
  doc["newton_iterations"] = r.newton_iterations;
  doc["hopf_solves"] = r.hopf_solves;
  doc["per_pair_values"] = detail::matrix_json(r.per_pair_values.values());
  doc["p_tilde_star"] = ordered_json::array();
  for (const auto& p : r.p_tilde_star) doc["p_tilde_star"].push_back(detail::vector_json(p));
  doc["history"] = ordered_json::array();
  for (const auto& rec : r.history) {
    ordered_json h;
    h["t"] = rec.t;
    h["phi"] = rec.phi;
    h["hamiltonian"] = rec.hamiltonian;
    h["assignment"] = detail::assignment_json(rec.sigma);
    h["step"] = to_string(rec.kind);
    h["bracket_lo"] = rec.bracket_lo;
    h["bracket_hi"] = std::isfinite(rec.bracket_hi) ? ordered_json(rec.bracket_hi) : ordered_json();
    h["assignment_switched"] = rec.assignment_switched;
    doc["history"].push_back(h);
  }
  return doc;
}

inline nlohmann::ordered_json joint_value_json(const JointValue& v) {
  nlohmann::ordered_json doc;
  doc["schema"] = "hopfcoord.joint_value";
  doc["schema_version"] = kReportSchemaVersion;
  doc["t"] = v.t;
  doc["phi"] = v.phi;
  doc["assignment"] = detail::assignment_json(v.assignment.sigma);
  doc["bottleneck_vehicle"] = v.assignment.bottleneck_vehicle + 1;
  doc["per_pair_values"] = detail::matrix_json(v.values.values());
  doc["hopf_solves"] = v.hopf_solves;
  return doc;
}

inline nlohmann::ordered_json validation_json(const ValidationReport& report) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : report.vehicles) {
    doc.push_back({{"vehicle", c.vehicle + 1},
                   {"goal", c.goal + 1},
                   {"terminal_implicit", c.terminal_implicit},
                   {"max_control_norm", c.max_control_norm},
                   {"hamiltonian_drift", c.hamiltonian_drift},
                   {"passed", c.passed()}});
  }
  return doc;
}

inline nlohmann::ordered_json sweep_json(const SweepResult& s) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "hopfcoord.sweep";
  doc["schema_version"] = kReportSchemaVersion;
  doc["axes"] = s.axes;
  doc["times"] = s.times;
  doc["values"] = s.values;
  doc["contours"] = ordered_json::array();
  for (const auto& lines : s.contours) {
    ordered_json at_time = ordered_json::array();
    for (const auto& line : lines) {
      ordered_json pts = ordered_json::array();
      for (const auto& p : line) pts.push_back({p[0], p[1]});
      at_time.push_back(pts);
    }
    doc["contours"].push_back(at_time);
  }
  return doc;
}

inline nlohmann::ordered_json trajectory_json(const SampledTrajectory& t) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "hopfcoord.trajectory";
  doc["schema_version"] = kReportSchemaVersion;
  doc["vehicle"] = t.vehicle + 1;
  doc["times"] = t.times;
  for (auto [key, series] : {std::pair{"states", &t.states}, std::pair{"controls", &t.controls},
                             std::pair{"costates", &t.costates}}) {
    doc[key] = ordered_json::array();
    for (const auto& v : *series) doc[key].push_back(detail::vector_json(v));
  }
  return doc;
}

// Columns: s, x1..xn, u1..um, lambda1..lambdan.
inline std::string trajectory_csv(const SampledTrajectory& t) {
  if (t.times.empty()) return "s\n";
  const auto n = t.states.front().size();
  const auto m = t.controls.front().size();
  std::string out = "s";
  for (Eigen::Index k = 0; k < n; ++k) out += ",x" + std::to_string(k + 1);
  for (Eigen::Index k = 0; k < m; ++k) out += ",u" + std::to_string(k + 1);
  for (Eigen::Index k = 0; k < n; ++k) out += ",lambda" + std::to_string(k + 1);
  out += "\n";
  for (std::size_t r = 0; r < t.times.size(); ++r) {
    out += format_number(t.times[r]);
    for (const Vector* v : {&t.states[r], &t.controls[r], &t.costates[r]}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) out += "," + format_number((*v)[k]);
    }
    out += "\n";
  }
  return out;
}

// Inverse of trajectory_csv; state and control sizes come from the header.
inline SampledTrajectory parse_trajectory_csv(const std::string& text, int vehicle = 0) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("trajectory csv: empty input");
  Eigen::Index n = 0, m = 0, costates = 0;
  {
    std::istringstream cols(header);
    std::string col;
    std::getline(cols, col, ',');
    if (col != "s") throw InvalidArgument("trajectory csv: first column must be 's'");
    while (std::getline(cols, col, ',')) {
      if (col.rfind("lambda", 0) == 0) {
        ++costates;
      } else if (col[0] == 'x') {
        ++n;
      } else if (col[0] == 'u') {
        ++m;
      } else {
        throw InvalidArgument("trajectory csv: unknown column '" + col + "'");
      }
    }
  }
  if (costates != n) throw InvalidArgument("trajectory csv: state and costate counts differ");
  SampledTrajectory t;
  t.vehicle = vehicle;
  std::string line;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::istringstream cols(line);
    std::string cell;
    while (std::getline(cols, cell, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size()) {
        throw InvalidArgument("trajectory csv: bad number '" + cell + "' on line " +
                              std::to_string(row));
      }
      cells.push_back(x);
    }
    if (static_cast<Eigen::Index>(cells.size()) != 1 + 2 * n + m) {
      throw InvalidArgument("trajectory csv: wrong column count on line " + std::to_string(row));
    }
    t.times.push_back(cells[0]);
    t.states.push_back(Eigen::Map<const Vector>(cells.data() + 1, n));
    t.controls.push_back(Eigen::Map<const Vector>(cells.data() + 1 + n, m));
    t.costates.push_back(Eigen::Map<const Vector>(cells.data() + 1 + n + m, n));
  }
  return t;
}

// Long format, one row per (time, node): t, x1..xd, phi.
inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "t";
  for (std::size_t a = 0; a < s.axes.size(); ++a) out += ",x" + std::to_string(a + 1);
  out += ",phi\n";
  const std::size_t nodes = s.node_count();
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    for (std::size_t node = 0; node < nodes; ++node) {
      std::vector<double> x(s.axes.size());
      std::size_t rest = node;
      for (std::size_t a = s.axes.size(); a-- > 0;) {
        x[a] = s.axes[a][rest % s.axes[a].size()];
        rest /= s.axes[a].size();
      }
      out += format_number(s.times[k]);
      for (double c : x) out += "," + format_number(c);
      out += "," + format_number(s.values[k][node]) + "\n";
    }
  }
  return out;
}

// Zero-level polylines: t, line index, point index, x, y.
inline std::string contours_csv(const SweepResult& s) {
  std::string out = "t,line,point,x,y\n";
  for (std::size_t k = 0; k < s.contours.size(); ++k) {
    for (std::size_t l = 0; l < s.contours[k].size(); ++l) {
      for (std::size_t p = 0; p < s.contours[k][l].size(); ++p) {
        out += format_number(s.times[k]) + "," + std::to_string(l) + "," + std::to_string(p) +
               "," + format_number(s.contours[k][l][p][0]) + "," +
               format_number(s.contours[k][l][p][1]) + "\n";
      }
    }
  }
  return out;
}

// Newton history: iteration, t, phi, H, step kind, assignment (1-based,
// space separated), switch flag.
inline std::string result_csv(const CoordinationResult& r) {
  std::string out = "iteration,t,phi,hamiltonian,step,assignment,assignment_switched\n";
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const auto& rec = r.history[k];
    std::string sigma;
    for (int g : rec.sigma) sigma += (sigma.empty() ? "" : " ") + std::to_string(g + 1);
    out += std::to_string(k + 1) + "," + format_number(rec.t) + "," + format_number(rec.phi) +
           "," + format_number(rec.hamiltonian) + "," + to_string(rec.kind) + "," + sigma + "," +
           (rec.assignment_switched ? "1" : "0") + "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline void export_result(const CoordinationResult& r, ExportFormat format,
                          const std::string& path) {
  write_text_file(path, format == ExportFormat::kJson ? to_json_text(result_json(r))
                                                      : result_csv(r));
}

inline void export_result(const SweepResult& s, ExportFormat format, const std::string& path) {
  write_text_file(path, format == ExportFormat::kJson ? to_json_text(sweep_json(s))
                                                      : sweep_csv(s));
}

inline void export_result(const SampledTrajectory& t, ExportFormat format,
                          const std::string& path) {
  write_text_file(path, format == ExportFormat::kJson ? to_json_text(trajectory_json(t))
                                                      : trajectory_csv(t));
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_EXPORT_HPP_
