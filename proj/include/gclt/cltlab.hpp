#pragma once

// Hypothesis statistics of the weighted CLT, the scenario catalog and the
// convergence experiment E[phi(S_n)] -> E[phi(X + eta)].

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "gpde.hpp"
#include "model.hpp"
#include "numeric.hpp"

namespace gclt {

// sum_{i<=n} |w_i|^{2+alpha} / W_n^{1+alpha/2}; must vanish as n grows.
inline double weight_ratio(const WeightSpec& weights, std::size_t n) {
  if (n < 1)
    throw std::invalid_argument("weight_ratio: requires n >= 1");
  weights.validate();
  const auto w = weights.normalized(n);
  CompensatedSum num, big_w;
  for (double v : w) {
    num.add(std::pow(std::abs(v), 2.0 + weights.alpha));
    big_w.add(v * v);
  }
  return num.value() / std::pow(big_w.value(), 1.0 + weights.alpha / 2.0);
}

struct CesaroDeviation {
  double sigma_dev = 0.0;
  double mu_dev = 0.0;
};

namespace detail {
template <class ParamsAt>
CesaroDeviation cesaro(const GParams& limit, ParamsAt&& params_at_i, const WeightSpec& weights,
                       std::size_t n) {
  if (n < 1)
    throw std::invalid_argument("cesaro_deviation: requires n >= 1");
  weights.validate();
  const auto w = weights.normalized(n);
  CompensatedSum big_w;
  for (double v : w)
    big_w.add(v * v);
  const double total = big_w.value();
  const double hi2 = limit.sigma_hi * limit.sigma_hi;
  const double lo2 = limit.sigma_lo * limit.sigma_lo;
  CompensatedSum sd, md;
  for (std::size_t i = 1; i <= n; ++i) {
    const GParams g = params_at_i(i);
    const double share = w[i - 1] * w[i - 1] / total;
    sd.add(share * (std::abs(g.sigma_hi * g.sigma_hi - hi2) +
                    std::abs(lo2 - g.sigma_lo * g.sigma_lo)));
    md.add(share * (std::abs(g.mu_hi - limit.mu_hi) + std::abs(limit.mu_lo - g.mu_lo)));
  }
  return {sd.value(), md.value()};
}
} // namespace detail

// Weighted Cesaro averages of the parameter deviations from seq.base.
inline CesaroDeviation cesaro_deviation(const SequenceSpec& seq, const WeightSpec& weights,
                                        std::size_t n) {
  seq.validate();
  return detail::cesaro(seq.base, [&](std::size_t i) { return params_at(seq, i); }, weights, n);
}

// Same statistics for the components a law actually carries.
inline CesaroDeviation cesaro_deviation(const StepLaw& law, const WeightSpec& weights,
                                        std::size_t n) {
  law.seq.validate();
  return detail::cesaro(law.limit_params(), [&](std::size_t i) { return law.params(i); },
                        weights, n);
}

// ---------------------------------------------------------------------------

enum class EvaluatorKind { tree, grid };

inline std::string_view to_string(EvaluatorKind e) {
  return e == EvaluatorKind::tree ? "tree" : "grid";
}

inline EvaluatorKind evaluator_from_string(std::string_view s) {
  if (s == "tree")
    return EvaluatorKind::tree;
  if (s == "grid")
    return EvaluatorKind::grid;
  throw std::invalid_argument("unknown evaluator '" + std::string(s) + "'");
}

struct Scenario {
  std::string name;
  StepLaw law;
  WeightSpec weights;
  TestFunction fn = phi::cos_k(1.0);
  std::vector<std::size_t> n_list;
  EvaluatorKind evaluator = EvaluatorKind::grid;
  // PDE grid for the limit.
  GridSpec grid;
  // Spacing of the grid evaluator; its half-width follows the reach of S_n.
  double dp_dx = 0.00125;
  // Only the weight statistics are meaningful (hypothesis-checker demo).
  bool ratio_only = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;

  void validate() const {
    law.seq.validate();
    if (law.fixed)
      law.fixed->validate();
    weights.validate();
    grid.validate();
    if (n_list.empty())
      throw std::invalid_argument("Scenario '" + name + "': n_list must be nonempty");
    for (std::size_t k = 0; k < n_list.size(); ++k) {
      if (n_list[k] < 1)
        throw std::invalid_argument("Scenario '" + name + "': n_list entries must be >= 1");
      if (k > 0 && n_list[k] <= n_list[k - 1])
        throw std::invalid_argument("Scenario '" + name + "': n_list must be ascending");
    }
    if (!(dp_dx > 0.0))
      throw std::invalid_argument("Scenario '" + name + "': dp_dx must be > 0");
    if (!ratio_only && evaluator == EvaluatorKind::tree && n_list.back() > TreeOptions{}.n_max)
      throw CapacityError("Scenario '" + name + "': tree evaluator requires n <= " +
                          std::to_string(TreeOptions{}.n_max) + "; use the grid evaluator");
  }
};

struct ConvergenceRow {
  std::size_t n = 0;
  double value_n = 0.0;
  double limit = 0.0;
  double abs_error = 0.0;
  double weight_ratio = 0.0;
  double sigma_dev = 0.0;
  double mu_dev = 0.0;
};

inline DPResult evaluate_sum(const Scenario& scn, std::size_t n) {
  if (scn.evaluator == EvaluatorKind::tree)
    return expect_weighted_sum_tree(scn.law, scn.weights, scn.fn, n);
  return expect_weighted_sum_grid(scn.law, scn.weights, scn.fn, n,
                                  covering_grid(scn.law, scn.weights, n, scn.dp_dx));
}

using RowSink = std::function<void(const ConvergenceRow&)>;

// Rows in ascending n. Each row is handed to `sink` as soon as it is
// complete, so callers keep partial results when a later row throws.
inline std::vector<ConvergenceRow> run_convergence(const Scenario& scn, const RowSink& sink = {}) {
  scn.validate();
  if (scn.ratio_only)
    throw std::invalid_argument("Scenario '" + scn.name +
                                "' only reports weight statistics; use check-weights");
  const double limit = limit_expectation(scn.law.limit_params(), scn.fn, scn.grid);
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : scn.n_list) {
    ConvergenceRow r;
    r.n = n;
    r.value_n = evaluate_sum(scn, n).value;
    r.limit = limit;
    r.abs_error = std::abs(r.value_n - limit);
    r.weight_ratio = weight_ratio(scn.weights, n);
    const auto dev = cesaro_deviation(scn.law, scn.weights, n);
    r.sigma_dev = dev.sigma_dev;
    r.mu_dev = dev.mu_dev;
    rows.push_back(r);
    if (sink)
      sink(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------

inline Scenario base_scenario(std::string name, GParams base, WeightGenerator w,
                              TestFunction fn, std::vector<std::size_t> n_list,
                              EvaluatorKind ev) {
  Scenario s;
  s.name = std::move(name);
  s.law = two_point_law({SequenceGenerator::constant, base, 0.0, {}});
  s.weights.generator = w;
  s.fn = std::move(fn);
  s.n_list = std::move(n_list);
  s.evaluator = ev;
  return s;
}

inline std::vector<Scenario> scenario_catalog() {
  const GParams pair{0.0, 0.2, 0.5, 1.0};
  const GParams vol{0.0, 0.0, 0.5, 1.0};
  const std::vector<std::size_t> clt_n{4, 16, 64, 256};
  std::vector<Scenario> out;

  // unit weights, X only, volatility bounds drifting towards (0.5, 1)
  {
    auto s = base_scenario("li-shi", vol, WeightGenerator::ones, phi::cos_k(1.0), clt_n,
                           EvaluatorKind::grid);
    s.law.seq.generator = SequenceGenerator::harmonic_drift;
    s.law.seq.drift_scale = 0.5;
    s.law.shape = LawShape::volatility_only;
    out.push_back(s);
  }
  out.push_back(base_scenario("peng-iid", pair, WeightGenerator::ones, phi::cos_k(1.0), clt_n,
                              EvaluatorKind::grid));
  out.push_back(base_scenario("weighted-linear", pair, WeightGenerator::identity,
                              phi::cos_k(1.0), clt_n, EvaluatorKind::grid));
  out.push_back(base_scenario("weighted-sqrt", pair, WeightGenerator::sqrt, phi::cos_k(1.0),
                              clt_n, EvaluatorKind::grid));
  {
    auto s = base_scenario("lln-maximal", {0.1, 0.5, 0.0, 0.0}, WeightGenerator::ones,
                           phi::smooth_step(0.3, 0.1), {1, 2, 4, 8, 12, 16, 20},
                           EvaluatorKind::tree);
    s.law.shape = LawShape::mean_only;
    // pure transport: unit Courant number moves the upper mean exactly
    s.grid.cfl = 1.0;
    out.push_back(s);
  }
  {
    auto s = base_scenario("bad-weights", pair, WeightGenerator::geometric, phi::cos_k(1.0),
                           {10, 20, 30}, EvaluatorKind::grid);
    s.weights.q = 2.0;
    s.weights.alpha = 1.0;
    s.ratio_only = true;
    out.push_back(s);
  }
  {
    auto s = base_scenario("universality-2pt", vol, WeightGenerator::ones, phi::cos_k(1.0),
                           {16, 64, 256}, EvaluatorKind::grid);
    s.law = fixed_law(rademacher_vol({0.5, 1.0}), vol);
    out.push_back(s);
  }
  {
    auto s = base_scenario("universality-3pt", vol, WeightGenerator::ones, phi::cos_k(1.0),
                           {16, 64, 256}, EvaluatorKind::grid);
    s.law = fixed_law(rademacher_vol({0.5, 0.75, 1.0}), vol);
    out.push_back(s);
  }
  {
    auto s = base_scenario("peng-iid-cos", vol, WeightGenerator::ones, phi::cos_k(1.0), clt_n,
                           EvaluatorKind::grid);
    s.law.shape = LawShape::volatility_only;
    out.push_back(s);
  }
  out.push_back(base_scenario("degenerate-gaussian", {0.0, 0.0, 1.0, 1.0},
                              WeightGenerator::ones, phi::cos_k(1.0), clt_n,
                              EvaluatorKind::grid));
  return out;
}

inline Scenario find_scenario(std::string_view name) {
  for (auto& s : scenario_catalog())
    if (s.name == name)
      return s;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

} // namespace gclt
