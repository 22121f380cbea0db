#pragma once

// Explicit monotone finite-difference solver for the one-dimensional G-heat
// equation in forward form
//
//   u_t = G(u_x, u_xx),   u(0, .) = phi,
//
// whose value u(1, 0) is the G-distributed expectation E[phi(X + eta)].
// Each node takes the best of the corner controls (sigma, mu) of G. The
// first-order term of a control is centered where its cell Peclet number
// |mu| dx / sigma^2 is at most one and upwinded otherwise, so every candidate
// update is a nonnegative combination of stencil values under the CFL bound.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gcore.hpp"
#include "grid_spec.hpp"
#include "model.hpp"
#include "numeric.hpp"

namespace gclt {

struct ValueGrid {
  GridSpec grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values; // [slice][node]
  // Half-width of the boundary collar whose values may be affected by the
  // artificial boundary, per stored slice.
  std::vector<double> influence_width;
  double dt = 0.0;
  std::size_t steps = 0;
  // Fraction of interior node updates that selected sigma_hi.
  double sigma_hi_fraction = 0.0;

  std::size_t nodes() const { return static_cast<std::size_t>(grid.nx) + 1; }

  bool influenced(double t, double x) const;
};

struct StencilCoefficients {
  Control control;
  double center = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool centered = false;
};

// Centered drift differences keep nonnegative weights iff sigma^2 >= |mu| dx.
inline bool centered_drift(const Control& c, double dx) {
  return c.mu != 0.0 && c.sigma * c.sigma >= std::abs(c.mu) * dx;
}

inline double stability_bound(const GParams& g, double dx) {
  const double denom = g.sigma_hi * g.sigma_hi + g.max_abs_mu() * dx;
  return denom > 0.0 ? dx * dx / denom : kInf;
}

// Stencil weights of u_j^{new} = center u_j + left u_{j-1} + right u_{j+1}
// for each corner control at time step dt.
inline std::vector<StencilCoefficients> scheme_coefficients(const GParams& g, double dx,
                                                            double dt) {
  std::vector<StencilCoefficients> out;
  for (const auto& c : corner_controls(g)) {
    const double diff = 0.5 * c.sigma * c.sigma * dt / (dx * dx);
    const double adv = c.mu * dt / dx;
    StencilCoefficients s{c, 1.0 - 2.0 * diff, diff, diff, centered_drift(c, dx)};
    if (s.centered) {
      s.right += 0.5 * adv;
      s.left -= 0.5 * adv;
    } else if (c.mu > 0.0) {
      s.right += adv;
      s.center -= adv;
    } else if (c.mu < 0.0) {
      s.left -= adv;
      s.center += adv;
    }
    out.push_back(s);
  }
  return out;
}

inline double resolve_time_step(const GParams& g, const GridSpec& grid) {
  const double bound = stability_bound(g, grid.dx());
  double dt = grid.dt > 0.0 ? grid.dt : grid.cfl * bound;
  if (grid.dt > 0.0 && grid.dt > bound * (1.0 + 1e-12))
    throw NumericError("CFL violation: dt = " + format_double(grid.dt) +
                       " exceeds the stability bound " + format_double(bound));
  if (!std::isfinite(dt))
    dt = grid.T;
  for (const auto& s : scheme_coefficients(g, grid.dx(), dt))
    if (s.center < -1e-12 || s.left < -1e-12 || s.right < -1e-12)
      throw NumericError("CFL violation: negative stencil coefficient for control (sigma=" +
                         format_double(s.control.sigma) + ", mu=" +
                         format_double(s.control.mu) + ")");
  return dt;
}

inline double boundary_influence_width(const GParams& g, double t) {
  return 6.0 * g.sigma_hi * std::sqrt(t) + g.max_abs_mu() * t;
}

inline void check_domain_coverage(const GParams& g, const TestFunction& fn,
                                  const GridSpec& grid) {
  const double need = fn.scale + boundary_influence_width(g, grid.T);
  if (grid.L < need)
    throw std::invalid_argument("GridSpec: L = " + format_double(grid.L) +
                                " is below the coverage requirement " + format_double(need));
}

// Advances `initial` (sampled on the nodes of `grid`) over [0, grid.T].
inline ValueGrid solve_gheat_from(const GParams& g, std::vector<double> initial,
                                  const GridSpec& grid) {
  g.validate();
  grid.validate();
  if (initial.size() != static_cast<std::size_t>(grid.nx) + 1)
    throw std::invalid_argument("solve_gheat: initial slice has the wrong length");
  const double dt = resolve_time_step(g, grid);
  const double dx = grid.dx();
  const double inv_dx = 1.0 / dx;
  const double inv_dx2 = inv_dx * inv_dx;
  const auto controls = corner_controls(g);
  std::vector<char> centered;
  for (const auto& c : controls)
    centered.push_back(centered_drift(c, dx));

  // uniform steps h = T / steps with h <= dt
  const std::size_t total_steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(grid.T / dt - 1e-9)));
  const double h = grid.T / static_cast<double>(total_steps);
  const std::size_t stride =
      grid.stride > 0 ? static_cast<std::size_t>(grid.stride)
                      : std::max<std::size_t>(1, total_steps / 512);

  ValueGrid vg;
  vg.grid = grid;
  vg.dt = h;
  vg.times.push_back(0.0);
  vg.values.push_back(initial);
  vg.influence_width.push_back(0.0);

  const int N = grid.nx;
  std::vector<double> u = std::move(initial), next(u.size());
  double upper = 0.0, updates = 0.0;
  double t = 0.0;
  for (std::size_t k = 1; k <= total_steps; ++k) {
    const bool last = k == total_steps;
    const double t_next = last ? grid.T : static_cast<double>(k) * h;
    for (int j = 0; j <= N; ++j) {
      const double d2 = (j > 0 && j < N) ? (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2 : 0.0;
      // inflow boundaries carry no first-order information
      const double fwd = j < N ? (u[j + 1] - u[j]) * inv_dx : 0.0;
      const double bwd = j > 0 ? (u[j] - u[j - 1]) * inv_dx : 0.0;
      const bool interior = j > 0 && j < N;
      const double mid = interior ? 0.5 * (u[j + 1] - u[j - 1]) * inv_dx : 0.0;
      double best = -kInf;
      bool took_upper = false;
      for (std::size_t ci = 0; ci < controls.size(); ++ci) {
        const Control& c = controls[ci];
        double v = 0.5 * c.sigma * c.sigma * d2;
        if (interior && centered[ci])
          v += c.mu * mid;
        else if (c.mu > 0.0)
          v += c.mu * fwd;
        else if (c.mu < 0.0)
          v += c.mu * bwd;
        if (v > best || (v == best && c.sigma == g.sigma_hi)) {
          best = v;
          took_upper = c.sigma == g.sigma_hi;
        }
      }
      next[j] = u[j] + h * best;
      if (!std::isfinite(next[j]))
        throw NumericError("G-heat solve: non-finite value at step " + std::to_string(k) +
                           " (t = " + format_double(t_next) + ", x = " +
                           format_double(grid.node(j)) + ")");
      if (j > 0 && j < N) {
        updates += 1.0;
        upper += took_upper ? 1.0 : 0.0;
      }
    }
    u.swap(next);
    t = t_next;
    if (k % stride == 0 || last) {
      vg.times.push_back(t);
      vg.values.push_back(u);
      vg.influence_width.push_back(boundary_influence_width(g, t));
    }
  }
  vg.steps = total_steps;
  vg.sigma_hi_fraction = updates > 0 ? upper / updates : 0.0;
  return vg;
}

inline std::vector<double> sample_on_grid(const TestFunction& fn, const GridSpec& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.nx) + 1);
  for (int j = 0; j <= grid.nx; ++j) {
    v[j] = fn(grid.node(j));
    if (!std::isfinite(v[j]))
      throw NumericError("G-heat solve: initial condition is not finite at x = " +
                         format_double(grid.node(j)));
  }
  return v;
}

inline ValueGrid solve_gheat(const GParams& g, const TestFunction& fn, const GridSpec& grid) {
  g.validate();
  grid.validate();
  check_domain_coverage(g, fn, grid);
  return solve_gheat_from(g, sample_on_grid(fn, grid), grid);
}

inline double eval_at(const ValueGrid& vg, double t, double x) {
  const double t_end = vg.times.back();
  const double ttol = 1e-12 * std::max(1.0, t_end);
  if (!(t >= -ttol && t <= t_end + ttol))
    throw std::out_of_range("eval_at: t = " + format_double(t) + " outside [0, " +
                            format_double(t_end) + "]");
  const double L = vg.grid.L;
  if (!(std::abs(x) <= L * (1.0 + 1e-12)))
    throw std::out_of_range("eval_at: x = " + format_double(x) + " outside [-L, L]");
  t = std::clamp(t, 0.0, t_end);
  x = std::clamp(x, -L, L);

  auto space = [&](const std::vector<double>& row) {
    const double q = (x + L) / vg.grid.dx();
    int j = static_cast<int>(std::floor(q));
    j = std::clamp(j, 0, vg.grid.nx);
    const double theta = q - j;
    if (theta <= 1e-12 || j == vg.grid.nx)
      return row[j];
    return row[j] + theta * (row[j + 1] - row[j]);
  };

  auto it = std::lower_bound(vg.times.begin(), vg.times.end(), t);
  std::size_t k1 = static_cast<std::size_t>(it - vg.times.begin());
  if (k1 < vg.times.size() && vg.times[k1] - t <= ttol)
    return space(vg.values[k1]);
  if (k1 > 0 && t - vg.times[k1 - 1] <= ttol)
    return space(vg.values[k1 - 1]);
  const std::size_t k0 = k1 - 1;
  const double w = (t - vg.times[k0]) / (vg.times[k1] - vg.times[k0]);
  const double a = space(vg.values[k0]);
  const double b = space(vg.values[k1]);
  return a + w * (b - a);
}

inline bool ValueGrid::influenced(double t, double x) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  const std::size_t k = std::min<std::size_t>(it - times.begin(), times.size() - 1);
  return std::abs(x) > grid.L - influence_width[k];
}

struct LimitValue {
  double value = 0.0;
  bool boundary_influenced = false;
};

inline LimitValue limit_expectation_checked(const GParams& g, const TestFunction& fn,
                                            const GridSpec& grid) {
  if (!(grid.T >= 1.0))
    throw std::invalid_argument("limit_expectation: requires grid.T >= 1");
  const auto vg = solve_gheat(g, fn, grid);
  return {eval_at(vg, 1.0, 0.0), vg.influenced(1.0, 0.0)};
}

// E[phi(X + eta)] for the G-distributed pair with parameters g.
inline double limit_expectation(const GParams& g, const TestFunction& fn, const GridSpec& grid) {
  return limit_expectation_checked(g, fn, grid).value;
}

// Flow defect sup |u(t1 + t2) - w(t2)| over nodes at distance at least
// 3 sigma_hi sqrt(t2) from the boundary, where w restarts the solver from the
// slice u(t1).
inline double semigroup_residual(const GParams& g, const TestFunction& fn, double t1, double t2,
                                 const GridSpec& grid) {
  if (!(t1 > 0.0) || !(t2 >= 0.0) || t1 + t2 > grid.T * (1.0 + 1e-12))
    throw std::invalid_argument("semigroup_residual: requires t1 > 0, t2 >= 0, t1 + t2 <= T");
  GridSpec to_t1 = grid;
  to_t1.T = t1;
  GridSpec full = grid;
  full.T = t1 + t2;
  check_domain_coverage(g, fn, full);
  const auto init = sample_on_grid(fn, grid);
  const auto first = solve_gheat_from(g, init, to_t1).values.back();
  const auto whole = solve_gheat_from(g, init, full).values.back();
  std::vector<double> restarted = first;
  if (t2 > 0.0) {
    GridSpec rest = grid;
    rest.T = t2;
    restarted = solve_gheat_from(g, first, rest).values.back();
  }
  const double collar = 3.0 * g.sigma_hi * std::sqrt(t2);
  double worst = 0.0;
  for (int j = 0; j <= grid.nx; ++j)
    if (std::abs(grid.node(j)) <= grid.L - collar)
      worst = std::max(worst, std::abs(whole[j] - restarted[j]));
  return worst;
}

} // namespace gclt
