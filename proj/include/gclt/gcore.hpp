#pragma once

// The sublinear generator G(p, a) of a one-dimensional G-distributed pair
// with mean ambiguity [mu_lo, mu_hi] and volatility ambiguity
// [sigma_lo, sigma_hi]:
//
//   G(p, a) = 1/2 (sigma_hi^2 a^+ - sigma_lo^2 a^-) + mu_hi p^+ - mu_lo p^-
//
// which equals the supremum of 1/2 sigma^2 a + mu p over the moment
// rectangle, attained at one of its four corners.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace gclt {

struct GParams {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  double sigma_lo = 0.0;
  double sigma_hi = 0.0;

  friend bool operator==(const GParams&, const GParams&) = default;

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const {
    if (!std::isfinite(mu_lo) || !std::isfinite(mu_hi) ||
        !std::isfinite(sigma_lo) || !std::isfinite(sigma_hi))
      throw std::invalid_argument("GParams: all parameters must be finite");
    if (!(mu_lo <= mu_hi))
      throw std::invalid_argument("GParams: requires mu_lo <= mu_hi");
    if (!(0.0 <= sigma_lo))
      throw std::invalid_argument("GParams: requires 0 <= sigma_lo");
    if (!(sigma_lo <= sigma_hi))
      throw std::invalid_argument("GParams: requires sigma_lo <= sigma_hi");
  }

  double max_abs_mu() const { return std::max(std::abs(mu_lo), std::abs(mu_hi)); }
};

struct Control {
  double sigma = 0.0;
  double mu = 0.0;
  friend bool operator==(const Control&, const Control&) = default;
};

// Contribution of a single control to the generator.
inline double control_value(double p, double a, const Control& c) {
  return 0.5 * (c.sigma * c.sigma * a) + c.mu * p;
}

inline double g_value(double p, double a, const GParams& g) {
  const double second = 0.5 * (g.sigma_hi * g.sigma_hi * positive_part(a) -
                               g.sigma_lo * g.sigma_lo * negative_part(a));
  return second + (g.mu_hi * positive_part(p) - g.mu_lo * negative_part(p));
}

// Maximizing corner; ties at a == 0 or p == 0 resolve to the upper element.
inline Control g_corner_control(double p, double a, const GParams& g) {
  return {a >= 0.0 ? g.sigma_hi : g.sigma_lo, p >= 0.0 ? g.mu_hi : g.mu_lo};
}

inline std::vector<Control> corner_controls(const GParams& g) {
  std::vector<Control> out;
  for (double s : {g.sigma_lo, g.sigma_hi})
    for (double m : {g.mu_lo, g.mu_hi}) {
      Control c{s, m};
      if (std::find(out.begin(), out.end(), c) == out.end())
        out.push_back(c);
    }
  return out;
}

struct GPropertySample {
  double p = 0.0;
  double a = 0.0;
  double p_bar = 0.0;
  double a_bar = 0.0;
  double lambda = 0.0;
};

struct GPropertyResidual {
  // G(p+p̄, a+ā) - G(p,a) - G(p̄,ā); must be <= 0.
  double subadditivity = 0.0;
  // G(λp, λa) - λ G(p,a); must vanish.
  double homogeneity = 0.0;
  // G(p,a) - G(p,ā) when a >= ā (else 0); must be >= 0.
  double monotonicity = 0.0;
  bool monotonicity_applies = false;
};

struct GPropertyReport {
  std::vector<GPropertyResidual> residuals;
  double worst_subadditivity = 0.0;
  double worst_homogeneity = 0.0;
  double worst_monotonicity = 0.0;

  bool passed(double tol = 1e-12) const {
    return worst_subadditivity <= tol && worst_homogeneity <= tol &&
           worst_monotonicity <= tol;
  }
};

inline GPropertyReport check_g_properties(const GParams& g,
                                          const std::vector<GPropertySample>& samples) {
  g.validate();
  GPropertyReport report;
  report.residuals.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.lambda >= 0.0))
      throw std::invalid_argument("check_g_properties: lambda must be >= 0");
    GPropertyResidual r;
    const double g1 = g_value(s.p, s.a, g);
    const double g2 = g_value(s.p_bar, s.a_bar, g);
    r.subadditivity = g_value(s.p + s.p_bar, s.a + s.a_bar, g) - g1 - g2;
    r.homogeneity = g_value(s.lambda * s.p, s.lambda * s.a, g) - s.lambda * g1;
    if (s.a >= s.a_bar) {
      r.monotonicity_applies = true;
      r.monotonicity = g1 - g_value(s.p, s.a_bar, g);
    }
    // homogeneity is exact up to rounding; scale by magnitude for the worst case
    const double scale = std::max(1.0, std::abs(s.lambda * g1));
    report.worst_subadditivity = std::max(report.worst_subadditivity, r.subadditivity);
    report.worst_homogeneity =
        std::max(report.worst_homogeneity, std::abs(r.homogeneity) / scale);
    if (r.monotonicity_applies)
      report.worst_monotonicity = std::max(report.worst_monotonicity, -r.monotonicity);
    report.residuals.push_back(r);
  }
  return report;
}

} // namespace gclt
