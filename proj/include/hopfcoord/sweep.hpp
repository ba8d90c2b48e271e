#ifndef HOPFCOORD_SWEEP_HPP_
#define HOPFCOORD_SWEEP_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hopfcoord/coordinator.hpp"
#include "hopfcoord/errors.hpp"
#include "hopfcoord/scenario_io.hpp"

namespace hopfcoord {

// Grids above this joint dimension are refused (the node count explodes).
inline constexpr std::size_t kMaxSweepDim = 3;

using Point2 = std::array<double, 2>;
using Polyline = std::vector<Point2>;

struct SweepResult {
  std::vector<std::vector<double>> axes;  // node coordinates per joint component
  std::vector<double> times;
  // values[k][node] = phi(x_node, times[k]); nodes are row-major with the
  // last axis fastest.
  std::vector<std::vector<double>> values;
  // Zero level set per time (two-dimensional grids only).
  std::vector<std::vector<Polyline>> contours;

  std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return axes.empty() ? 0 : n;
  }
};

inline std::vector<double> axis_nodes(const SweepAxis& axis) {
  std::vector<double> out(static_cast<std::size_t>(axis.count));
  for (int k = 0; k < axis.count; ++k) {
    out[k] = k + 1 == axis.count ? axis.max
                                 : axis.min + (axis.max - axis.min) * k / (axis.count - 1);
  }
  return out;
}

// Zero level set of a function sampled on a grid by marching squares.
// values are row-major over (x, y) with y fastest: values[ix * ny + iy].
// Crossing points are placed by linear interpolation along cell edges; the
// saddle cases are resolved by the cell-center average. Segments are joined
// into polylines through shared edges, open chains first, in a fixed order.
inline std::vector<Polyline> zero_contours(const std::vector<double>& xs,
                                           const std::vector<double>& ys,
                                           const std::vector<double>& values) {
  const std::size_t nx = xs.size(), ny = ys.size();
  if (values.size() != nx * ny) throw DimensionMismatch("zero_contours: grid size mismatch");
  std::vector<Polyline> out;
  if (nx < 2 || ny < 2) return out;
  auto at = [&](std::size_t ix, std::size_t iy) { return values[ix * ny + iy]; };
  auto above = [&](std::size_t ix, std::size_t iy) { return at(ix, iy) > 0.0; };
  // Edge ids: 2 * node for the edge towards +x, 2 * node + 1 towards +y.
  auto node = [&](std::size_t ix, std::size_t iy) { return static_cast<std::int64_t>(ix * ny + iy); };
  auto crossing = [&](std::int64_t edge) -> Point2 {
    const std::size_t n = static_cast<std::size_t>(edge / 2);
    const std::size_t ix = n / ny, iy = n % ny;
    const bool along_x = edge % 2 == 0;
    const std::size_t jx = along_x ? ix + 1 : ix, jy = along_x ? iy : iy + 1;
    const double f0 = at(ix, iy), f1 = at(jx, jy);
    const double w = f0 == f1 ? 0.5 : f0 / (f0 - f1);
    return {xs[ix] + w * (xs[jx] - xs[ix]), ys[iy] + w * (ys[jy] - ys[iy])};
  };

  std::vector<std::array<std::int64_t, 2>> segments;
  for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
    for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
      // Corners counter-clockwise: (0,0), (1,0), (1,1), (0,1); edges between
      // consecutive corners: bottom, right, top, left.
      const bool c[4] = {above(ix, iy), above(ix + 1, iy), above(ix + 1, iy + 1),
                         above(ix, iy + 1)};
      const std::int64_t e[4] = {2 * node(ix, iy), 2 * node(ix + 1, iy) + 1,
                                 2 * node(ix, iy + 1), 2 * node(ix, iy) + 1};
      std::vector<int> cut;
      for (int k = 0; k < 4; ++k) {
        if (c[k] != c[(k + 1) % 4]) cut.push_back(k);
      }
      if (cut.size() == 2) {
        segments.push_back({e[cut[0]], e[cut[1]]});
      } else if (cut.size() == 4) {
        const double center =
            0.25 * (at(ix, iy) + at(ix + 1, iy) + at(ix + 1, iy + 1) + at(ix, iy + 1));
        // Join each edge to the neighbour that keeps the center's side
        // connected.
        if ((center > 0.0) == c[0]) {
          segments.push_back({e[0], e[1]});
          segments.push_back({e[2], e[3]});
        } else {
          segments.push_back({e[3], e[0]});
          segments.push_back({e[1], e[2]});
        }
      }
    }
  }

  std::map<std::int64_t, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    by_edge[segments[k][0]].push_back(k);
    by_edge[segments[k][1]].push_back(k);
  }
  std::vector<bool> used(segments.size(), false);
  auto walk = [&](std::int64_t start) {
    std::vector<std::int64_t> edges = {start};
    std::int64_t current = start;
    while (true) {
      std::size_t next = segments.size();
      for (std::size_t k : by_edge[current]) {
        if (!used[k]) {
          next = k;
          break;
        }
      }
      if (next == segments.size()) break;
      used[next] = true;
      current = segments[next][0] == current ? segments[next][1] : segments[next][0];
      edges.push_back(current);
    }
    // A node exactly on the level set is hit from two edges; keep it once.
    Polyline line;
    for (std::int64_t edge : edges) {
      const Point2 p = crossing(edge);
      if (line.empty() || p != line.back()) line.push_back(p);
    }
    out.push_back(std::move(line));
  };
  for (const auto& [edge, list] : by_edge) {
    if (list.size() == 1 && !used[list[0]]) walk(edge);
  }
  for (const auto& [edge, list] : by_edge) {
    for (std::size_t k : list) {
      if (!used[k]) walk(edge);
    }
  }
  return out;
}

// phi(x, t) over a grid of joint initial states (one axis per joint state
// component) at each listed time. Node evaluations run in parallel, one
// thread per node batch, each joint_value single-threaded.
inline SweepResult run_sweep(const CoordinationProblem& base, const SweepSpec& spec) {
  base.validate();
  const JointModel& joint = base.joint;
  const auto dim = static_cast<std::size_t>(joint.total_state_dim());
  if (dim > kMaxSweepDim) {
    throw InvalidArgument("run_sweep: joint state dimension " + std::to_string(dim) +
                          " exceeds the sweep limit of " + std::to_string(kMaxSweepDim));
  }
  if (spec.axes.size() != dim) {
    throw DimensionMismatch("run_sweep: " + std::to_string(spec.axes.size()) +
                            " axes for a joint state of dimension " + std::to_string(dim));
  }
  SweepResult out;
  for (const auto& axis : spec.axes) {
    if (axis.count < 2 || !(axis.max > axis.min)) {
      throw InvalidArgument("run_sweep: each axis needs count >= 2 and max > min");
    }
    out.axes.push_back(axis_nodes(axis));
  }
  out.times = spec.times;
  if (out.times.empty()) return out;

  const std::size_t nodes = out.node_count();
  out.values.assign(out.times.size(), std::vector<double>(nodes, 0.0));
  std::vector<std::exception_ptr> failures(nodes);
  CoordinationProblem serial = base;
  serial.settings.threads = 1;
  parallel_for(nodes, resolve_thread_count(base.settings.threads), [&](std::size_t k) {
    try {
      CoordinationProblem problem = serial;
      Vector x(static_cast<Eigen::Index>(dim));
      std::size_t rest = k;
      for (std::size_t a = dim; a-- > 0;) {
        x[static_cast<Eigen::Index>(a)] = out.axes[a][rest % out.axes[a].size()];
        rest /= out.axes[a].size();
      }
      for (std::size_t i = 0; i < joint.size(); ++i) {
        problem.initial_states[i] = joint.state_block(x, i);
      }
      for (std::size_t t = 0; t < out.times.size(); ++t) {
        out.values[t][k] = joint_value(problem, out.times[t]).phi;
      }
    } catch (...) {
      failures[k] = std::current_exception();
    }
  });
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  out.contours.resize(out.times.size());
  if (dim == 2) {
    for (std::size_t t = 0; t < out.times.size(); ++t) {
      out.contours[t] = zero_contours(out.axes[0], out.axes[1], out.values[t]);
    }
  }
  return out;
}

inline SweepResult run_sweep(const Scenario& scenario) {
  if (!scenario.sweep) throw InvalidArgument("run_sweep: scenario has no sweep section");
  return run_sweep(make_problem(scenario), *scenario.sweep);
}

// Distance from a point to the nearest segment of any polyline.
inline double distance_to_contours(const std::vector<Polyline>& lines, const Point2& p) {
  double best = INFINITY;
  for (const auto& line : lines) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      const Point2& a = line[k];
      const Point2& b = k + 1 < line.size() ? line[k + 1] : line[k];
      const double dx = b[0] - a[0], dy = b[1] - a[1];
      const double len_sq = dx * dx + dy * dy;
      double u = len_sq > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len_sq : 0.0;
      u = std::clamp(u, 0.0, 1.0);
      best = std::min(best, std::hypot(a[0] + u * dx - p[0], a[1] + u * dy - p[1]));
    }
  }
  return best;
}

}  // namespace hopfcoord

#endif  // HOPFCOORD_SWEEP_HPP_
