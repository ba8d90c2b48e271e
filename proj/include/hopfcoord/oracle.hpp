#ifndef HOPFCOORD_ORACLE_HPP_
#define HOPFCOORD_ORACLE_HPP_

// Ground-truth generators that share no code path with the Hopf solver:
// closed-form 1-D values, a monotone grid scheme, and central differences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hopfcoord/errors.hpp"
#include "hopfcoord/norms.hpp"

namespace hopfcoord::oracle {

// Value of  x' = b u, |u| <= 1  with goal |x - c| <= r  after horizon t.
inline double analytic_value_1d(double b_gain, double c, double r, double x, double t) {
  return std::max(std::abs(x - c) - b_gain * t, 0.0) - r;
}

inline double analytic_min_time_1d(double b_gain, double c, double r, double x) {
  return std::max(std::abs(x - c) - r, 0.0) / b_gain;
}

struct Grid1D {
  double lower = -10.0;
  double upper = 10.0;
  int nodes = 2001;
  double cfl = 0.5;

  void validate() const {
    if (nodes < 3 || !(lower < upper) || !(cfl > 0.0 && cfl <= 1.0)) {
      throw InvalidArgument("Grid1D: need nodes >= 3, lower < upper, cfl in (0, 1]");
    }
  }
  double spacing() const { return (upper - lower) / (nodes - 1); }
  double node(int k) const { return lower + k * spacing(); }
};

struct SampledValue {
  std::vector<double> x;
  std::vector<double> phi;

  // Linear interpolation between nodes.
  double at(double query) const {
    if (query <= x.front()) return phi.front();
    if (query >= x.back()) return phi.back();
    const double h = x[1] - x[0];
    const auto k = static_cast<std::size_t>((query - x.front()) / h);
    const std::size_t k0 = std::min(k, x.size() - 2);
    const double w = (query - x[k0]) / h;
    return (1.0 - w) * phi[k0] + w * phi[k0 + 1];
  }
};

// Evolves  phi_t + b |phi_x| = 0,  phi(., 0) = initial  with the
// Lax-Friedrichs flux  H((p- + p+)/2) - b (p+ - p-)/2. Boundary slopes are
// extrapolated, so values within b*t of either end are contaminated; the
// optional query interval must stay clear of that zone.
inline SampledValue lax_friedrichs_1d(const Grid1D& grid, double b_gain,
                                      const std::function<double(double)>& initial, double t,
                                      double query_lower = NAN, double query_upper = NAN) {
  grid.validate();
  if (!(b_gain > 0.0) || !(t >= 0.0)) {
    throw InvalidArgument("lax_friedrichs_1d: need b > 0 and t >= 0");
  }
  const double reach = b_gain * t;
  if (!std::isnan(query_lower) &&
      (grid.lower + reach >= query_lower || grid.upper - reach <= query_upper)) {
    throw InvalidArgument("lax_friedrichs_1d: domain [" + std::to_string(grid.lower) + ", " +
                          std::to_string(grid.upper) +
                          "] too small; boundary influence reaches the query region");
  }
  const int n = grid.nodes;
  const double dx = grid.spacing();
  SampledValue out;
  out.x.resize(n);
  out.phi.resize(n);
  for (int k = 0; k < n; ++k) {
    out.x[k] = grid.node(k);
    out.phi[k] = initial(out.x[k]);
  }
  if (t == 0.0) return out;

  const int steps = static_cast<int>(std::ceil(t / (grid.cfl * dx / b_gain)));
  const double dt = t / steps;
  std::vector<double> slope(n + 1);
  std::vector<double> next(n);
  for (int step = 0; step < steps; ++step) {
    for (int k = 1; k < n; ++k) slope[k] = (out.phi[k] - out.phi[k - 1]) / dx;
    slope[0] = slope[1];
    slope[n] = slope[n - 1];
    for (int k = 0; k < n; ++k) {
      const double minus = slope[k];
      const double plus = slope[k + 1];
      const double flux = b_gain * std::abs(0.5 * (minus + plus)) - 0.5 * b_gain * (plus - minus);
      next[k] = out.phi[k] - dt * flux;
    }
    out.phi.swap(next);
  }
  return out;
}

// Central differences, one coordinate at a time.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                         const Vector& p, double h = 1e-6) {
  Vector g(p.size());
  Vector probe = p;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    probe[k] = p[k] + h;
    const double up = f(probe);
    probe[k] = p[k] - h;
    const double down = f(probe);
    probe[k] = p[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace hopfcoord::oracle

#endif  // HOPFCOORD_ORACLE_HPP_
