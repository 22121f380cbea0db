#pragma once

// Sublinear expectations of the normalized weighted sum
//
//   S_n = sum_{i=1}^n ( w_i X_i / sqrt(W_n) + w_i^2 Y_i / W_n ),  W_n = sum w_i^2,
//
// where each new pair (X_i, Y_i) is independent from the past. Independence
// in the nested sense turns E[phi(S_n)] into the backward recursion
//
//   V_n(s) = phi(s),
//   V_{i-1}(s) = max_{(sigma,mu)} 1/2 [ V_i(s + a_i sigma + b_i mu)
//                                      + V_i(s - a_i sigma + b_i mu) ],
//
// with a_i = w_i / sqrt(W_n) and b_i = w_i^2 / W_n, and E[phi(S_n)] = V_0(0).
// Two evaluators are provided: an exact one over the reachable state tree
// and an approximate one on a uniform grid with linear interpolation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid_spec.hpp"
#include "model.hpp"
#include "numeric.hpp"

namespace gclt {

// ---------------------------------------------------------------------------
// Weights

enum class WeightGenerator { ones, identity, sqrt, geometric, custom_table };

inline std::string_view to_string(WeightGenerator g) {
  switch (g) {
  case WeightGenerator::ones: return "ones";
  case WeightGenerator::identity: return "identity";
  case WeightGenerator::sqrt: return "sqrt";
  case WeightGenerator::geometric: return "geometric";
  case WeightGenerator::custom_table: return "custom_table";
  }
  return "unknown";
}

inline WeightGenerator weight_generator_from_string(std::string_view s) {
  for (auto g : {WeightGenerator::ones, WeightGenerator::identity, WeightGenerator::sqrt,
                 WeightGenerator::geometric, WeightGenerator::custom_table})
    if (to_string(g) == s)
      return g;
  throw std::invalid_argument("unknown weight generator '" + std::string(s) + "'");
}

struct WeightSpec {
  WeightGenerator generator = WeightGenerator::ones;
  double q = 2.0;
  // Exponent of the smallness ratio. Values in (0,1) are admissible for the
  // theorem; alpha = 1 is accepted as a diagnostic value (see outside_range()).
  double alpha = 0.5;
  std::vector<double> table;

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("WeightSpec: requires alpha in (0, 1]");
    if (generator == WeightGenerator::geometric && !(q > 0.0 && std::isfinite(q)))
      throw std::invalid_argument("WeightSpec: geometric weights require q > 0");
    if (generator == WeightGenerator::custom_table) {
      if (table.empty())
        throw std::invalid_argument("WeightSpec: custom_table needs a nonempty table");
      for (double w : table)
        if (w == 0.0 || !std::isfinite(w))
          throw std::invalid_argument("WeightSpec: weights must be finite and nonzero");
    }
  }

  bool alpha_outside_range() const { return alpha >= 1.0; }

  double weight(std::size_t i) const {
    if (i < 1)
      throw std::out_of_range("WeightSpec: index must be >= 1");
    switch (generator) {
    case WeightGenerator::ones: return 1.0;
    case WeightGenerator::identity: return static_cast<double>(i);
    case WeightGenerator::sqrt: return std::sqrt(static_cast<double>(i));
    case WeightGenerator::geometric: return std::pow(q, static_cast<double>(i));
    case WeightGenerator::custom_table:
      if (i > table.size())
        throw std::out_of_range("WeightSpec: index " + std::to_string(i) +
                                " exceeds custom table length " +
                                std::to_string(table.size()));
      return table[i - 1];
    }
    return 1.0;
  }

  // w_1..w_n divided by max|w_i|. Every quantity built from the weights is
  // scale invariant, and geometric weights overflow when left unscaled.
  std::vector<double> normalized(std::size_t n) const {
    std::vector<double> w(n);
    if (generator == WeightGenerator::geometric) {
      const double top = q >= 1.0 ? static_cast<double>(n) : 1.0;
      for (std::size_t i = 1; i <= n; ++i)
        w[i - 1] = std::pow(q, static_cast<double>(i) - top);
      return w;
    }
    double m = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      w[i - 1] = weight(i);
      m = std::max(m, std::abs(w[i - 1]));
    }
    for (double& v : w)
      v /= m;
    return w;
  }
};

// ---------------------------------------------------------------------------
// Step laws and the per-step plan

// Which components of the pair (X_i, Y_i) a law carries.
enum class LawShape { pair, volatility_only, mean_only };

inline std::string_view to_string(LawShape s) {
  switch (s) {
  case LawShape::pair: return "pair";
  case LawShape::volatility_only: return "volatility_only";
  case LawShape::mean_only: return "mean_only";
  }
  return "unknown";
}

inline LawShape law_shape_from_string(std::string_view s) {
  for (auto v : {LawShape::pair, LawShape::volatility_only, LawShape::mean_only})
    if (to_string(v) == s)
      return v;
  throw std::invalid_argument("unknown law shape '" + std::string(s) + "'");
}

// Law of the i-th summand: the two-point set built from the i-th parameters
// of `seq` (restricted to the components selected by `shape`), or a fixed
// ambiguity set when `fixed` is present.
struct StepLaw {
  SequenceSpec seq;
  LawShape shape = LawShape::pair;
  std::optional<VariableSpec> fixed;

  friend bool operator==(const StepLaw&, const StepLaw&) = default;

  GParams project(GParams g) const {
    if (shape == LawShape::volatility_only)
      g.mu_lo = g.mu_hi = 0.0;
    else if (shape == LawShape::mean_only)
      g.sigma_lo = g.sigma_hi = 0.0;
    return g;
  }

  // Parameters of the limiting G-distributed pair.
  GParams limit_params() const { return project(seq.base); }

  GParams params(std::size_t i) const {
    if (fixed) {
      const auto& v = *fixed;
      return {v.mus().front(), v.mus().back(), v.sigmas().front(), v.sigmas().back()};
    }
    return project(params_at(seq, i));
  }

  VariableSpec at(std::size_t i) const {
    if (fixed)
      return *fixed;
    const GParams g = params_at(seq, i);
    switch (shape) {
    case LawShape::volatility_only: return rademacher_vol({g.sigma_lo, g.sigma_hi});
    case LawShape::mean_only: return maximal_mean({g.mu_lo, g.mu_hi});
    case LawShape::pair: break;
    }
    return make_two_point_pair(g);
  }
};

inline StepLaw two_point_law(SequenceSpec seq, LawShape shape = LawShape::pair) {
  return {std::move(seq), shape, std::nullopt};
}
inline StepLaw fixed_law(VariableSpec var, GParams base) {
  return {SequenceSpec{SequenceGenerator::constant, base, 0.0, {}}, LawShape::pair,
          std::move(var)};
}

struct Step {
  double a = 0.0; // coefficient of X_i
  double b = 0.0; // coefficient of Y_i
  VariableSpec var;
};

inline std::vector<Step> make_steps(const StepLaw& law, const WeightSpec& weights,
                                    std::size_t n) {
  if (n < 1)
    throw std::invalid_argument("weighted sum requires n >= 1");
  weights.validate();
  const auto w = weights.normalized(n);
  CompensatedSum wsum;
  for (double v : w)
    wsum.add(v * v);
  const double big_w = wsum.value();
  const double root_w = std::sqrt(big_w);
  std::vector<Step> steps;
  steps.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    VariableSpec var = law.at(i);
    var.validate();
    const double wi = w[i - 1];
    steps.push_back({wi / root_w, wi * wi / big_w, std::move(var)});
  }
  return steps;
}

// Largest |S_n| over all control sequences and signs.
inline double reach_bound(const std::vector<Step>& steps) {
  CompensatedSum r;
  for (const auto& s : steps)
    r.add(std::abs(s.a) * s.var.max_sigma() + s.b * s.var.max_abs_mu());
  return r.value();
}

// ---------------------------------------------------------------------------
// One-step and nested expectations

// E[phi(X + Y)] for a single pair.
template <class F>
double expect_single(const VariableSpec& var, F&& fn) {
  var.validate();
  return one_step_expectation(var, fn);
}

// E[f(X, Y)] for a single pair with X = eps*sigma and Y = mu.
template <class F2>
double expect_pair(const VariableSpec& var, F2&& f) {
  var.validate();
  double best = -kInf;
  for (double s : var.sigmas())
    for (double m : var.mus())
      best = std::max(best, 0.5 * (f(s, m) + f(-s, m)));
  return best;
}

// E[f(X, Y)] = E[ E[f(x, Y)]_{x = X} ] for Y independent from X.
template <class F2>
double expect_nested(const VariableSpec& outer, const VariableSpec& inner, F2&& f) {
  outer.validate();
  inner.validate();
  return one_step_expectation(outer, [&](double x) {
    return one_step_expectation(inner, [&](double y) { return f(x, y); });
  });
}

// ---------------------------------------------------------------------------
// Results

enum class DPMethod { tree_exact, grid };

inline std::string_view to_string(DPMethod m) {
  return m == DPMethod::tree_exact ? "tree_exact" : "grid";
}

struct DPResult {
  double value = 0.0;
  std::size_t n = 0;
  DPMethod method = DPMethod::tree_exact;
  std::map<std::string, double> diagnostics;
  bool reliable = true;
};

namespace detail {

inline constexpr double kTieTolerance = 1e-14;

// Picks the maximizing control, preferring the later (lexicographically
// larger) one among near ties. Returns the index and the exact maximum.
template <class Eval>
std::pair<std::size_t, double> best_control(std::size_t count, Eval&& eval) {
  double best = -kInf;
  double chosen_value = -kInf;
  std::size_t chosen = 0;
  for (std::size_t c = 0; c < count; ++c) {
    const double v = eval(c);
    best = std::max(best, v);
    if (v >= chosen_value - kTieTolerance) {
      chosen = c;
      chosen_value = std::max(v, chosen_value);
    }
  }
  return {chosen, best};
}

// Multisets of outcomes drawn by a group of steps that share the same
// coefficients and control set. States reached by permuted outcome
// sequences coincide, so they are stored once.
struct StepGroup {
  Step step;
  std::size_t size = 0; // number of steps in the group
  std::vector<double> displacement; // per outcome
  struct ControlOutcomes {
    std::size_t plus, minus;
    bool upper_sigma, upper_mu;
  };
  std::vector<ControlOutcomes> controls;
  // multisets[m] lists count vectors of total m, partial[m] their displacement
  // sums, child[m][j * outcomes + o] the index of multiset j plus outcome o.
  std::vector<std::vector<std::vector<std::uint8_t>>> multisets;
  std::vector<std::vector<double>> partial;
  std::vector<std::vector<std::uint32_t>> child;

  std::size_t outcomes() const { return displacement.size(); }
};

inline bool same_step(const Step& x, const Step& y) {
  return x.a == y.a && x.b == y.b && x.var.sigmas() == y.var.sigmas() &&
         x.var.mus() == y.var.mus();
}

inline double multiset_count(std::size_t m, std::size_t outcomes) {
  // C(m + outcomes - 1, outcomes - 1)
  double c = 1.0;
  for (std::size_t k = 1; k < outcomes; ++k)
    c = c * static_cast<double>(m + k) / static_cast<double>(k);
  return std::round(c);
}

inline void enumerate_multisets(std::size_t outcomes, std::size_t total,
                                std::vector<std::vector<std::uint8_t>>& out) {
  std::vector<std::uint8_t> cur(outcomes, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == outcomes) {
      cur[pos] = static_cast<std::uint8_t>(left);
      out.push_back(cur);
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;) {
      cur[pos] = static_cast<std::uint8_t>(c);
      rec(pos + 1, left - c);
    }
  };
  rec(0, total);
}

inline void build_group_tables(StepGroup& g) {
  const auto& sig = g.step.var.sigmas();
  const auto& mus = g.step.var.mus();
  std::vector<std::pair<double, double>> outcome_xy; // (signed sigma, mu)
  auto index_of = [&](double x, double m) {
    for (std::size_t k = 0; k < outcome_xy.size(); ++k)
      if (outcome_xy[k].first == x && outcome_xy[k].second == m)
        return k;
    outcome_xy.push_back({x, m});
    return outcome_xy.size() - 1;
  };
  for (double s : sig)
    for (double m : mus) {
      const std::size_t plus = index_of(s, m);
      const std::size_t minus = s == 0.0 ? plus : index_of(-s, m);
      g.controls.push_back({plus, minus, s == sig.back(), m == mus.back()});
    }
  for (const auto& [x, m] : outcome_xy)
    g.displacement.push_back(g.step.a * x + g.step.b * m);

  const std::size_t o = g.outcomes();
  g.multisets.resize(g.size + 1);
  g.partial.resize(g.size + 1);
  g.child.resize(g.size);
  for (std::size_t m = 0; m <= g.size; ++m) {
    enumerate_multisets(o, m, g.multisets[m]);
    auto& ps = g.partial[m];
    ps.reserve(g.multisets[m].size());
    for (const auto& counts : g.multisets[m]) {
      double s = 0.0;
      for (std::size_t k = 0; k < o; ++k)
        if (counts[k] != 0)
          s += static_cast<double>(counts[k]) * g.displacement[k];
      ps.push_back(s);
    }
  }
  for (std::size_t m = 0; m < g.size; ++m) {
    std::map<std::vector<std::uint8_t>, std::uint32_t> next;
    for (std::size_t j = 0; j < g.multisets[m + 1].size(); ++j)
      next.emplace(g.multisets[m + 1][j], static_cast<std::uint32_t>(j));
    auto& ch = g.child[m];
    ch.resize(g.multisets[m].size() * o);
    for (std::size_t j = 0; j < g.multisets[m].size(); ++j) {
      auto counts = g.multisets[m][j];
      for (std::size_t k = 0; k < o; ++k) {
        ++counts[k];
        ch[j * o + k] = next.at(counts);
        --counts[k];
      }
    }
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Exact evaluator

struct TreeOptions {
  std::size_t n_max = 20;
  // Upper bound on the number of distinct states summed over all levels.
  double max_states = 16.0 * 1024 * 1024;
};

// Exact E[phi(S_n)] for finite control sets. Steps sharing coefficients and
// controls are merged by outcome multiset; otherwise the state count grows
// like (2 * controls)^n and the state budget applies.
template <class F>
DPResult expect_weighted_sum_tree(const StepLaw& law, const WeightSpec& weights, F&& fn,
                                  std::size_t n, const TreeOptions& opt = {}) {
  if (n > opt.n_max)
    throw CapacityError("tree evaluator: n = " + std::to_string(n) + " exceeds n_max_tree = " +
                        std::to_string(opt.n_max) + "; use the grid evaluator");
  const auto steps = make_steps(law, weights, n);

  std::vector<detail::StepGroup> groups;
  std::vector<std::size_t> group_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t g = 0;
    while (g < groups.size() && !detail::same_step(groups[g].step, steps[i]))
      ++g;
    if (g == groups.size()) {
      groups.emplace_back();
      groups.back().step = steps[i];
    }
    ++groups[g].size;
    group_of[i] = g;
  }

  // counts[level][g]: steps of group g among the first `level` steps
  std::vector<std::vector<std::size_t>> counts(n + 1, std::vector<std::size_t>(groups.size(), 0));
  for (std::size_t i = 0; i < n; ++i) {
    counts[i + 1] = counts[i];
    ++counts[i + 1][group_of[i]];
  }
  double total_states = 0.0;
  for (std::size_t level = 0; level <= n; ++level) {
    double states = 1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& sig = groups[g].step.var.sigmas();
      const std::size_t zero = static_cast<std::size_t>(sig.front() == 0.0);
      const std::size_t o = (2 * sig.size() - zero) * groups[g].step.var.mus().size();
      states *= detail::multiset_count(counts[level][g], o);
    }
    total_states += states;
  }
  if (total_states > opt.max_states)
    throw CapacityError("tree evaluator: " + std::to_string(total_states) +
                        " states exceed the budget of " + std::to_string(opt.max_states));

  for (auto& g : groups)
    detail::build_group_tables(g);

  auto level_size = [&](std::size_t level) {
    std::size_t s = 1;
    for (std::size_t g = 0; g < groups.size(); ++g)
      s *= groups[g].multisets[counts[level][g]].size();
    return s;
  };

  // Leaves.
  std::vector<double> next(level_size(n));
  {
    std::vector<std::size_t> idx(groups.size());
    for (std::size_t flat = 0; flat < next.size(); ++flat) {
      std::size_t r = flat;
      double s = 0.0;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::size_t radix = groups[g].multisets[counts[n][g]].size();
        idx[g] = r % radix;
        r /= radix;
        s += groups[g].partial[counts[n][g]][idx[g]];
      }
      const double v = fn(s);
      if (!std::isfinite(v))
        throw NumericError("tree evaluator: payoff is not finite at s = " + format_double(s));
      next[flat] = v;
    }
  }

  double decisions = 0.0, upper_sigma = 0.0, upper_mu = 0.0;
  std::vector<double> cur;
  for (std::size_t level = n; level-- > 0;) {
    const std::size_t h = group_of[level];
    const auto& grp = groups[h];
    const std::size_t m = counts[level][h];
    std::size_t stride = 1;
    for (std::size_t g = 0; g < h; ++g)
      stride *= groups[g].multisets[counts[level][g]].size();
    const std::size_t radix_now = grp.multisets[m].size();
    const std::size_t radix_next = grp.multisets[m + 1].size();
    const std::size_t o = grp.outcomes();
    cur.assign(level_size(level), 0.0);
    for (std::size_t flat = 0; flat < cur.size(); ++flat) {
      const std::size_t low = flat % stride;
      const std::size_t j = (flat / stride) % radix_now;
      const std::size_t high = flat / (stride * radix_now);
      const std::size_t base_next = low + high * stride * radix_next;
      const auto* ch = &grp.child[m][j * o];
      auto [c, best] = detail::best_control(grp.controls.size(), [&](std::size_t k) {
        const auto& co = grp.controls[k];
        return 0.5 * (next[base_next + ch[co.plus] * stride] +
                      next[base_next + ch[co.minus] * stride]);
      });
      cur[flat] = best;
      decisions += 1.0;
      upper_sigma += grp.controls[c].upper_sigma ? 1.0 : 0.0;
      upper_mu += grp.controls[c].upper_mu ? 1.0 : 0.0;
    }
    next.swap(cur);
  }

  DPResult res;
  res.value = next.at(0);
  res.n = n;
  res.method = DPMethod::tree_exact;
  res.diagnostics["states"] = total_states;
  res.diagnostics["groups"] = static_cast<double>(groups.size());
  res.diagnostics["policy_upper_sigma_fraction"] = decisions > 0 ? upper_sigma / decisions : 0.0;
  res.diagnostics["policy_upper_mu_fraction"] = decisions > 0 ? upper_mu / decisions : 0.0;
  return res;
}

template <class F>
DPResult expect_weighted_sum_tree(const SequenceSpec& seq, const WeightSpec& weights, F&& fn,
                                  std::size_t n, const TreeOptions& opt = {}) {
  return expect_weighted_sum_tree(two_point_law(seq), weights, std::forward<F>(fn), n, opt);
}

// ---------------------------------------------------------------------------
// Grid evaluator

struct GridDPOptions {
  // Fraction of boundary-clamped queries, among those that can influence
  // V_0(0), above which the result is flagged unreliable.
  double max_boundary_fraction = 1e-3;
};

// Grid covering every reachable state plus the growth of the interpolation
// stencil (one cell per step).
inline GridSpec covering_grid(const std::vector<Step>& steps, double dx) {
  return grid_with_spacing(reach_bound(steps) + (steps.size() + 2) * dx, dx);
}

inline GridSpec covering_grid(const StepLaw& law, const WeightSpec& weights, std::size_t n,
                              double dx) {
  return covering_grid(make_steps(law, weights, n), dx);
}

// Same recursion as the tree evaluator with V_i stored on the nodes of `grid`
// and evaluated off-grid by piecewise linear interpolation. Queries outside
// [-L, L] take the nearest edge value and are counted.
template <class F>
DPResult expect_weighted_sum_grid(const StepLaw& law, const WeightSpec& weights, F&& fn,
                                  std::size_t n, const GridSpec& grid,
                                  const GridDPOptions& opt = {}) {
  grid.validate();
  const auto steps = make_steps(law, weights, n);
  const double reach = reach_bound(steps);
  if (grid.L < reach)
    throw std::invalid_argument("grid evaluator: L = " + format_double(grid.L) +
                                " does not cover the reachable range " + format_double(reach));

  const int nodes = grid.nx + 1;
  const double dx = grid.dx();
  std::vector<double> next(nodes), cur(nodes);
  for (int j = 0; j < nodes; ++j) {
    next[j] = fn(grid.node(j));
    if (!std::isfinite(next[j]))
      throw NumericError("grid evaluator: payoff is not finite at x = " +
                         format_double(grid.node(j)));
  }

  // reach of the first i steps, for the dependence cone of V_0(0)
  std::vector<double> partial_reach(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    partial_reach[i + 1] = partial_reach[i] + std::abs(steps[i].a) * steps[i].var.max_sigma() +
                           steps[i].b * steps[i].var.max_abs_mu();

  struct Shift {
    int k;
    double theta;
  };
  auto make_shift = [&](double d) {
    const double q = d / dx;
    double k = std::floor(q);
    double theta = q - k;
    if (theta < 1e-12) {
      theta = 0.0;
    } else if (1.0 - theta < 1e-12) {
      theta = 0.0;
      k += 1.0;
    }
    return Shift{static_cast<int>(k), theta};
  };

  double interp_bound = 0.0;
  double relevant_queries = 0.0, relevant_hits = 0.0, total_hits = 0.0;
  double decisions = 0.0, upper_sigma = 0.0;

  for (std::size_t level = n; level-- > 0;) {
    const Step& st = steps[level];
    const auto controls = st.var.controls();
    std::vector<std::pair<Shift, Shift>> shifts;
    for (const auto& c : controls)
      shifts.push_back({make_shift(st.a * c.sigma + st.b * c.mu),
                        make_shift(-st.a * c.sigma + st.b * c.mu)});

    double max_curv = 0.0;
    for (int j = 1; j + 1 < nodes; ++j)
      max_curv = std::max(max_curv, std::abs(next[j + 1] - 2.0 * next[j] + next[j - 1]));
    interp_bound += max_curv / 8.0;

    const double cone = partial_reach[level] + (level + 1) * dx;
    for (int j = 0; j < nodes; ++j) {
      const bool relevant = std::abs(grid.node(j)) <= cone;
      bool hit = false;
      auto interp = [&](const Shift& s) {
        const int i0 = j + s.k;
        if (i0 < 0) {
          hit = true;
          return next[0];
        }
        if (s.theta == 0.0 ? i0 > nodes - 1 : i0 + 1 > nodes - 1) {
          hit = true;
          return next[nodes - 1];
        }
        if (s.theta == 0.0)
          return next[i0];
        return next[i0] + s.theta * (next[i0 + 1] - next[i0]);
      };
      auto [c, best] = detail::best_control(controls.size(), [&](std::size_t k) {
        return 0.5 * (interp(shifts[k].first) + interp(shifts[k].second));
      });
      cur[j] = best;
      if (hit)
        total_hits += 1.0;
      if (relevant) {
        relevant_queries += 1.0;
        if (hit)
          relevant_hits += 1.0;
        decisions += 1.0;
        upper_sigma += controls[c].sigma == st.var.max_sigma() ? 1.0 : 0.0;
      }
    }
    next.swap(cur);
  }

  DPResult res;
  res.n = n;
  res.method = DPMethod::grid;
  {
    const double q = 0.5 * grid.nx; // node index of x = 0
    const int j0 = static_cast<int>(std::floor(q));
    const double theta = q - j0;
    res.value = (theta < 1e-12 || j0 + 1 >= nodes) ? next[j0]
                                                    : next[j0] + theta * (next[j0 + 1] - next[j0]);
  }
  const double frac = relevant_queries > 0 ? relevant_hits / relevant_queries : 0.0;
  res.reliable = frac <= opt.max_boundary_fraction;
  res.diagnostics["dx"] = dx;
  res.diagnostics["L"] = grid.L;
  res.diagnostics["reach"] = reach;
  res.diagnostics["interp_error_bound"] = interp_bound;
  res.diagnostics["boundary_hits"] = total_hits;
  res.diagnostics["relevant_boundary_hits"] = relevant_hits;
  res.diagnostics["relevant_boundary_fraction"] = frac;
  res.diagnostics["policy_upper_sigma_fraction"] = decisions > 0 ? upper_sigma / decisions : 0.0;
  res.diagnostics["unreliable"] = res.reliable ? 0.0 : 1.0;
  return res;
}

template <class F>
DPResult expect_weighted_sum_grid(const SequenceSpec& seq, const WeightSpec& weights, F&& fn,
                                  std::size_t n, const GridSpec& grid,
                                  const GridDPOptions& opt = {}) {
  return expect_weighted_sum_grid(two_point_law(seq), weights, std::forward<F>(fn), n, grid, opt);
}

// ---------------------------------------------------------------------------
// Axioms of a sublinear expectation

using Payoff = std::function<double(double)>;
using Evaluator = std::function<double(const Payoff&)>;

struct AxiomReport {
  int trials = 0;
  double monotonicity = 0.0;      // max(0, E[psi] - E[phi]) with psi <= phi
  double constant_preserving = 0.0; // |E[c] - c|
  double subadditivity = 0.0;     // max(0, E[phi + psi] - E[phi] - E[psi])
  double homogeneity = 0.0;       // |E[lambda phi] - lambda E[phi]|
  double cash_invariance = 0.0;   // |E[phi + c] - E[phi] - c|

  double worst() const {
    return std::max({monotonicity, constant_preserving, subadditivity, homogeneity,
                     cash_invariance});
  }
  bool passed(double tol) const { return worst() <= tol; }
};

inline AxiomReport axiom_suite(const Evaluator& eval, const std::vector<TestFunction>& catalog,
                               int trials, std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("axiom_suite: requires trials >= 1");
  if (catalog.empty())
    throw std::invalid_argument("axiom_suite: empty catalog");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1);
  std::uniform_real_distribution<double> lam_dist(0.0, 3.0), c_dist(-2.0, 2.0),
      d_dist(0.0, 1.0);

  AxiomReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const TestFunction& f = catalog[pick(rng)];
    const TestFunction& g = catalog[pick(rng)];
    const TestFunction& h = catalog[pick(rng)];
    const double lambda = t % 10 == 0 ? 0.0 : lam_dist(rng);
    const double c = c_dist(rng);
    const double d = d_dist(rng);

    const double ef = eval([&](double x) { return f(x); });
    const double eg = eval([&](double x) { return g(x); });
    const double e_low = eval([&](double x) { return std::min(f(x), h(x)) - d; });
    const double e_const = eval([&](double) { return c; });
    const double e_sum = eval([&](double x) { return f(x) + g(x); });
    const double e_scaled = eval([&](double x) { return lambda * f(x); });
    const double e_shift = eval([&](double x) { return f(x) + c; });

    rep.monotonicity = std::max(rep.monotonicity, e_low - ef);
    rep.constant_preserving = std::max(rep.constant_preserving, std::abs(e_const - c));
    rep.subadditivity = std::max(rep.subadditivity, e_sum - ef - eg);
    rep.homogeneity = std::max(rep.homogeneity, std::abs(e_scaled - lambda * ef));
    rep.cash_invariance = std::max(rep.cash_invariance, std::abs(e_shift - ef - c));
  }
  return rep;
}

// Bounded payoffs used for randomized axiom checks.
inline std::vector<TestFunction> default_axiom_catalog() {
  return {phi::cos_k(1.0),       phi::sin_k(2.0),         phi::clip_linear(1.0),
          phi::smooth_step(0.0, 0.3), phi::smooth_step(0.5, 0.1), phi::arctan_s(1.5),
          phi::cos_k(0.5),       phi::constant(0.25)};
}

} // namespace gclt
