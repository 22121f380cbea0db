#pragma once

// Ambiguity sets for the summands (X_i, Y_i), per-index parameter
// sequences, and the catalog of test functions phi.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gcore.hpp"

namespace gclt {

// ---------------------------------------------------------------------------
// Test functions

enum class PhiKind {
  cos_k,
  sin_k,
  quad,
  neg_quad,
  linear,
  clip_linear,
  smooth_step,
  arctan_s,
  constant,
};

inline constexpr std::array<std::pair<PhiKind, std::string_view>, 9> kPhiNames{{
    {PhiKind::cos_k, "cos_k"},
    {PhiKind::sin_k, "sin_k"},
    {PhiKind::quad, "quad"},
    {PhiKind::neg_quad, "neg_quad"},
    {PhiKind::linear, "linear"},
    {PhiKind::clip_linear, "clip_linear"},
    {PhiKind::smooth_step, "smooth_step"},
    {PhiKind::arctan_s, "arctan_s"},
    {PhiKind::constant, "constant"},
}};

inline std::string_view to_string(PhiKind k) {
  for (const auto& [kind, name] : kPhiNames)
    if (kind == k)
      return name;
  return "unknown";
}

inline PhiKind phi_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kPhiNames)
    if (name == s)
      return kind;
  throw std::invalid_argument("unknown test function '" + std::string(s) + "'");
}

struct TestFunction {
  PhiKind kind = PhiKind::cos_k;
  // cos_k/sin_k: {k}; clip_linear: {M}; smooth_step: {a, eps};
  // arctan_s: {s}; constant: {c}; others: {}.
  std::vector<double> parameters;
  // Global Lipschitz constant; +inf when none exists (quad, neg_quad).
  double lipschitz_const = 0.0;
  bool bounded = true;
  // sup |phi|, +inf when unbounded.
  double bound = 0.0;
  // Half-width of the region where phi has structure the PDE domain must
  // resolve; 0 for functions without a localized feature.
  double scale = 0.0;

  friend bool operator==(const TestFunction&, const TestFunction&) = default;

  double param(std::size_t i) const {
    if (i >= parameters.size())
      throw std::invalid_argument("test function '" + std::string(to_string(kind)) +
                                  "' is missing parameter " + std::to_string(i));
    return parameters[i];
  }

  // Lipschitz constant on [-radius, radius].
  double lipschitz_on(double radius) const {
    if (kind == PhiKind::quad || kind == PhiKind::neg_quad)
      return 2.0 * radius;
    return lipschitz_const;
  }

  double operator()(double x) const;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace phi {

inline TestFunction cos_k(double k = 1.0) {
  return {PhiKind::cos_k, {k}, std::abs(k), true, 1.0, 0.0};
}
inline TestFunction sin_k(double k = 1.0) {
  return {PhiKind::sin_k, {k}, std::abs(k), true, 1.0, 0.0};
}
inline TestFunction quad() { return {PhiKind::quad, {}, kInf, false, kInf, 0.0}; }
inline TestFunction neg_quad() { return {PhiKind::neg_quad, {}, kInf, false, kInf, 0.0}; }
inline TestFunction linear() { return {PhiKind::linear, {}, 1.0, false, kInf, 0.0}; }
inline TestFunction clip_linear(double m) {
  if (!(m > 0.0))
    throw std::invalid_argument("clip_linear: requires M > 0");
  return {PhiKind::clip_linear, {m}, 1.0, true, m, m};
}
inline TestFunction smooth_step(double center, double width = 0.1) {
  if (!(width > 0.0))
    throw std::invalid_argument("smooth_step: requires eps > 0");
  return {PhiKind::smooth_step, {center, width}, 0.5 / width, true, 1.0,
          std::abs(center) + 5.0 * width};
}
inline TestFunction arctan_s(double s = 1.0) {
  return {PhiKind::arctan_s, {s}, std::abs(s), true, std::numbers::pi / 2.0, 0.0};
}
inline TestFunction constant(double c) {
  return {PhiKind::constant, {c}, 0.0, true, std::abs(c), 0.0};
}

// Rebuilds metadata from a kind and its parameter list (config input path).
inline TestFunction make(PhiKind kind, const std::vector<double>& p) {
  auto at = [&](std::size_t i, double def) { return i < p.size() ? p[i] : def; };
  switch (kind) {
  case PhiKind::cos_k: return cos_k(at(0, 1.0));
  case PhiKind::sin_k: return sin_k(at(0, 1.0));
  case PhiKind::quad: return quad();
  case PhiKind::neg_quad: return neg_quad();
  case PhiKind::linear: return linear();
  case PhiKind::clip_linear: return clip_linear(at(0, 1.0));
  case PhiKind::smooth_step: return smooth_step(at(0, 0.0), at(1, 0.1));
  case PhiKind::arctan_s: return arctan_s(at(0, 1.0));
  case PhiKind::constant: return constant(at(0, 0.0));
  }
  throw std::invalid_argument("unknown test function kind");
}

} // namespace phi

inline double eval_phi(const TestFunction& fn, double x) {
  switch (fn.kind) {
  case PhiKind::cos_k: return std::cos(fn.param(0) * x);
  case PhiKind::sin_k: return std::sin(fn.param(0) * x);
  case PhiKind::quad: return x * x;
  case PhiKind::neg_quad: return -(x * x);
  case PhiKind::linear: return x;
  case PhiKind::clip_linear: {
    const double m = fn.param(0);
    return std::max(-m, std::min(m, x));
  }
  case PhiKind::smooth_step:
    return 0.5 * (1.0 + std::tanh((x - fn.param(0)) / fn.param(1)));
  case PhiKind::arctan_s: return std::atan(fn.param(0) * x);
  case PhiKind::constant: return fn.param(0);
  }
  throw std::invalid_argument("eval_phi: unknown test function");
}

inline double TestFunction::operator()(double x) const { return eval_phi(*this, x); }

// ---------------------------------------------------------------------------
// Ambiguity sets

enum class VariableKind { rademacher_vol, maximal_mean, joint_pair };

// A random variable realized as mu + eps * sigma with a fair sign eps and a
// control (sigma, mu) chosen adversarially from sigma_set x mu_set. An empty
// set stands for {0}.
struct VariableSpec {
  VariableKind kind = VariableKind::joint_pair;
  std::vector<double> sigma_set;
  std::vector<double> mu_set;

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;

  void validate() const {
    auto ascending = [](const std::vector<double>& v) {
      return std::is_sorted(v.begin(), v.end()) &&
             std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
    };
    if (!finite(sigma_set) || !finite(mu_set))
      throw std::invalid_argument("VariableSpec: control sets must be finite numbers");
    if (!ascending(sigma_set) || !ascending(mu_set))
      throw std::invalid_argument("VariableSpec: control sets must be strictly ascending");
    if (!sigma_set.empty() && sigma_set.front() < 0.0)
      throw std::invalid_argument("VariableSpec: volatility controls must be >= 0");
    switch (kind) {
    case VariableKind::rademacher_vol:
      if (sigma_set.empty() || !mu_set.empty())
        throw std::invalid_argument(
            "VariableSpec: rademacher_vol needs a nonempty sigma_set and empty mu_set");
      break;
    case VariableKind::maximal_mean:
      if (!sigma_set.empty() || mu_set.empty())
        throw std::invalid_argument(
            "VariableSpec: maximal_mean needs an empty sigma_set and nonempty mu_set");
      break;
    case VariableKind::joint_pair:
      if (sigma_set.empty() || mu_set.empty())
        throw std::invalid_argument("VariableSpec: joint_pair needs both control sets");
      break;
    }
  }

  const std::vector<double>& sigmas() const {
    static const std::vector<double> zero{0.0};
    return sigma_set.empty() ? zero : sigma_set;
  }
  const std::vector<double>& mus() const {
    static const std::vector<double> zero{0.0};
    return mu_set.empty() ? zero : mu_set;
  }

  // Ascending in (sigma, mu).
  std::vector<Control> controls() const {
    std::vector<Control> out;
    for (double s : sigmas())
      for (double m : mus())
        out.push_back({s, m});
    return out;
  }

  double max_sigma() const { return sigmas().back(); }
  double max_abs_mu() const {
    return std::max(std::abs(mus().front()), std::abs(mus().back()));
  }
};

namespace detail {
inline std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}
} // namespace detail

inline VariableSpec rademacher_vol(std::vector<double> sigmas) {
  VariableSpec v{VariableKind::rademacher_vol, detail::unique_sorted(std::move(sigmas)), {}};
  v.validate();
  return v;
}

inline VariableSpec maximal_mean(std::vector<double> mus) {
  VariableSpec v{VariableKind::maximal_mean, {}, detail::unique_sorted(std::move(mus))};
  v.validate();
  return v;
}

inline VariableSpec joint_pair(std::vector<double> sigmas, std::vector<double> mus) {
  VariableSpec v{VariableKind::joint_pair, detail::unique_sorted(std::move(sigmas)),
                 detail::unique_sorted(std::move(mus))};
  v.validate();
  return v;
}

// Canonical two-point ambiguity set {sigma_lo, sigma_hi} x {mu_lo, mu_hi}.
inline VariableSpec make_two_point_pair(const GParams& g) {
  g.validate();
  return joint_pair({g.sigma_lo, g.sigma_hi}, {g.mu_lo, g.mu_hi});
}

// Uniform control grid on [lo, hi]: both endpoints plus `interior` points.
// Approximates interval ambiguity; the one-step maximum over an interval
// need not sit at an endpoint for non-convex value functions.
inline std::vector<double> control_grid(double lo, double hi, int interior = 9) {
  if (!(lo <= hi) || interior < 0)
    throw std::invalid_argument("control_grid: requires lo <= hi and interior >= 0");
  std::vector<double> out;
  const int m = interior + 1;
  for (int k = 0; k <= m; ++k)
    out.push_back(k == m ? hi : lo + (hi - lo) * k / m);
  return detail::unique_sorted(std::move(out));
}

// One-step sublinear expectation of g(X) where X = mu + eps*sigma:
// max over controls of the symmetric average 1/2 (g(mu + sigma) + g(mu - sigma)).
template <class F>
double one_step_expectation(const VariableSpec& var, F&& g) {
  double best = -kInf;
  for (double s : var.sigmas())
    for (double m : var.mus())
      best = std::max(best, 0.5 * (g(m + s) + g(m - s)));
  return best;
}

// Necessary test for equality in distribution: agreement of one-step
// expectations on every catalog function. Agreement on a finite catalog does
// not prove equality.
inline bool distributions_equal(const VariableSpec& a, const VariableSpec& b,
                                const std::vector<TestFunction>& catalog, double tol) {
  if (catalog.empty())
    throw std::invalid_argument("distributions_equal: empty catalog");
  if (!(tol > 0.0))
    throw std::invalid_argument("distributions_equal: requires tol > 0");
  for (const auto& fn : catalog) {
    const double ea = one_step_expectation(a, fn);
    const double eb = one_step_expectation(b, fn);
    if (!(std::abs(ea - eb) <= tol))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Per-index parameter sequences

enum class SequenceGenerator { constant, harmonic_drift, alternating_decay, custom_table };

inline std::string_view to_string(SequenceGenerator g) {
  switch (g) {
  case SequenceGenerator::constant: return "constant";
  case SequenceGenerator::harmonic_drift: return "harmonic_drift";
  case SequenceGenerator::alternating_decay: return "alternating_decay";
  case SequenceGenerator::custom_table: return "custom_table";
  }
  return "unknown";
}

inline SequenceGenerator sequence_generator_from_string(std::string_view s) {
  for (auto g : {SequenceGenerator::constant, SequenceGenerator::harmonic_drift,
                 SequenceGenerator::alternating_decay, SequenceGenerator::custom_table})
    if (to_string(g) == s)
      return g;
  throw std::invalid_argument("unknown sequence generator '" + std::string(s) + "'");
}

// harmonic_drift widens the upper parameters:
//   sigma_hi_i^2 = sigma_hi^2 + d/i,  mu_hi_i = mu_hi + d/i.
// alternating_decay widens the upper parameters by d/i on odd i and the lower
// ones on even i (sigma_lo_i^2 = max(0, sigma_lo^2 - d/i), mu_lo_i = mu_lo - d/i).
// `base` holds the limiting constants.
struct SequenceSpec {
  SequenceGenerator generator = SequenceGenerator::constant;
  GParams base;
  double drift_scale = 0.0;
  std::vector<GParams> table;

  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;

  void validate() const {
    base.validate();
    if (!std::isfinite(drift_scale))
      throw std::invalid_argument("SequenceSpec: drift_scale must be finite");
    if ((generator == SequenceGenerator::harmonic_drift ||
         generator == SequenceGenerator::alternating_decay) &&
        drift_scale < 0.0)
      throw std::invalid_argument("SequenceSpec: drift_scale must be >= 0");
    if (generator == SequenceGenerator::custom_table) {
      if (table.empty())
        throw std::invalid_argument("SequenceSpec: custom_table needs a nonempty table");
      for (const auto& g : table)
        g.validate();
    }
  }
};

inline GParams params_at(const SequenceSpec& seq, std::size_t i) {
  if (i < 1)
    throw std::out_of_range("params_at: index must be >= 1");
  const double shift = seq.drift_scale / static_cast<double>(i);
  GParams out = seq.base;
  switch (seq.generator) {
  case SequenceGenerator::constant:
    break;
  case SequenceGenerator::harmonic_drift:
    out.sigma_hi = std::sqrt(seq.base.sigma_hi * seq.base.sigma_hi + shift);
    out.mu_hi = seq.base.mu_hi + shift;
    break;
  case SequenceGenerator::alternating_decay:
    if (i % 2 == 1) {
      out.sigma_hi = std::sqrt(seq.base.sigma_hi * seq.base.sigma_hi + shift);
      out.mu_hi = seq.base.mu_hi + shift;
    } else {
      out.sigma_lo =
          std::sqrt(std::max(0.0, seq.base.sigma_lo * seq.base.sigma_lo - shift));
      out.mu_lo = seq.base.mu_lo - shift;
    }
    break;
  case SequenceGenerator::custom_table:
    if (i > seq.table.size())
      throw std::out_of_range("params_at: index " + std::to_string(i) +
                              " exceeds custom table length " +
                              std::to_string(seq.table.size()));
    out = seq.table[i - 1];
    break;
  }
  return out;
}

} // namespace gclt
