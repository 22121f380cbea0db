#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "gclt/engine.hpp"
#include "gclt/gcore.hpp"

using namespace gclt;

namespace {

StepLaw vol_law(GParams g) { return two_point_law({SequenceGenerator::constant, g, 0.0, {}},
                                                  LawShape::volatility_only); }

WeightSpec weights_of(WeightGenerator g) {
  WeightSpec w;
  w.generator = g;
  return w;
}

// Brute-force nested recursion over every control path and sign.
double brute_force(const std::vector<Step>& steps, std::size_t i, double s,
                   const std::function<double(double)>& fn) {
  if (i == steps.size())
    return fn(s);
  double best = -1e300;
  for (const auto& c : steps[i].var.controls()) {
    const double up = brute_force(steps, i + 1, s + steps[i].a * c.sigma + steps[i].b * c.mu, fn);
    const double dn = brute_force(steps, i + 1, s - steps[i].a * c.sigma + steps[i].b * c.mu, fn);
    best = std::max(best, 0.5 * (up + dn));
  }
  return best;
}

} // namespace

TEST(ExpectSingle, Examples) {
  EXPECT_EQ(expect_single(rademacher_vol({0.5, 1.0}), phi::quad()), 1.0);
  EXPECT_EQ(expect_single(rademacher_vol({0.5, 1.0}), phi::neg_quad()), -0.25);
  EXPECT_EQ(expect_single(maximal_mean({0.1, 0.5}), phi::linear()), 0.5);
}

TEST(ExpectNested, Examples) {
  const auto unit = rademacher_vol({1.0});
  EXPECT_EQ(expect_nested(unit, unit, [](double x, double y) { return x * y; }), 0.0);
  EXPECT_EQ(expect_nested(unit, rademacher_vol({0.5, 1.0}),
                          [](double x, double y) { return x * x * y * y; }),
            1.0);
}

TEST(ExpectPair, ReproducesG) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const GParams g{-0.2, 0.6, 0.4, 1.1};
  const auto v = make_two_point_pair(g);
  for (int t = 0; t < 1000; ++t) {
    const double p = u(rng), a = u(rng);
    const double e = expect_pair(v, [&](double x, double y) { return 0.5 * a * x * x + p * y; });
    EXPECT_NEAR(e, g_value(p, a, g), 1e-12);
  }
}

TEST(TreeDP, HandComputedValues) {
  const auto law = vol_law({0.0, 0.0, 0.5, 1.0});
  const auto ones = weights_of(WeightGenerator::ones);
  EXPECT_NEAR(expect_weighted_sum_tree(law, ones, phi::quad(), 1).value, 1.0, 1e-12);
  EXPECT_NEAR(expect_weighted_sum_tree(law, ones, phi::quad(), 2).value, 1.0, 1e-12);

  auto mean = two_point_law({SequenceGenerator::constant, {0.0, 1.0, 0.0, 0.0}, 0.0, {}},
                            LawShape::mean_only);
  const auto step = phi::smooth_step(0.5, 0.1);
  const double v = expect_weighted_sum_tree(mean, ones, step, 3).value;
  double best = -1.0;
  for (int k = 0; k <= 3; ++k)
    best = std::max(best, step(k / 3.0));
  EXPECT_EQ(v, best);
  EXPECT_EQ(best, step(1.0));
}

TEST(TreeDP, MomentIdentitiesAtOneStep) {
  const GParams g{-0.3, 0.45, 0.35, 0.8};
  const auto law = two_point_law({SequenceGenerator::constant, g, 0.0, {}});
  const auto ones = weights_of(WeightGenerator::ones);
  const auto vol = vol_law(g);
  auto mean_law = two_point_law({SequenceGenerator::constant, g, 0.0, {}}, LawShape::mean_only);
  EXPECT_NEAR(expect_weighted_sum_tree(vol, ones, phi::quad(), 1).value, 0.64, 1e-12);
  EXPECT_NEAR(expect_weighted_sum_tree(vol, ones, phi::neg_quad(), 1).value, -0.1225, 1e-12);
  EXPECT_NEAR(expect_weighted_sum_tree(mean_law, ones, phi::linear(), 1).value, 0.45, 1e-12);
  EXPECT_NEAR(expect_weighted_sum_tree(mean_law, ones, [](double y) { return -y; }, 1).value,
              0.3, 1e-12);
  (void)law;
}

TEST(TreeDP, MatchesBruteForceForDistinctWeights) {
  const GParams g{-0.1, 0.3, 0.4, 1.0};
  const auto law = two_point_law({SequenceGenerator::harmonic_drift, g, 0.5, {}});
  for (auto wg : {WeightGenerator::identity, WeightGenerator::sqrt, WeightGenerator::ones}) {
    const auto w = weights_of(wg);
    for (std::size_t n : {1u, 3u, 5u}) {
      const auto steps = make_steps(law, w, n);
      const auto fn = phi::cos_k(1.3);
      EXPECT_NEAR(expect_weighted_sum_tree(law, w, fn, n).value,
                  brute_force(steps, 0, 0.0, fn), 1e-13);
    }
  }
}

TEST(TreeDP, CapacityErrors) {
  const auto law = vol_law({0.0, 0.0, 0.5, 1.0});
  EXPECT_THROW(expect_weighted_sum_tree(law, weights_of(WeightGenerator::ones), phi::quad(), 21),
               CapacityError);
  const auto pair = two_point_law({SequenceGenerator::constant, {0.0, 0.2, 0.5, 1.0}, 0.0, {}});
  EXPECT_THROW(
      expect_weighted_sum_tree(pair, weights_of(WeightGenerator::identity), phi::quad(), 20),
      CapacityError);
}

TEST(TreeDP, BitReproducible) {
  const auto law = two_point_law({SequenceGenerator::constant, {0.0, 0.2, 0.5, 1.0}, 0.0, {}});
  const auto w = weights_of(WeightGenerator::ones);
  const double a = expect_weighted_sum_tree(law, w, phi::cos_k(1.0), 16).value;
  const double b = expect_weighted_sum_tree(law, w, phi::cos_k(1.0), 16).value;
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(DPEvaluators, ConstantPreserving) {
  const auto law = two_point_law({SequenceGenerator::constant, {0.0, 0.2, 0.5, 1.0}, 0.0, {}});
  const auto w = weights_of(WeightGenerator::sqrt);
  for (std::size_t n : {1u, 4u, 6u}) {
    EXPECT_EQ(expect_weighted_sum_tree(law, w, phi::constant(0.7), n).value, 0.7);
    EXPECT_EQ(expect_weighted_sum_grid(law, w, phi::constant(0.7), n,
                                       covering_grid(law, w, n, 0.01))
                  .value,
              0.7);
  }
  EXPECT_EQ(expect_weighted_sum_grid(law, w, phi::constant(0.7), 64,
                                     covering_grid(law, w, 64, 0.01))
                .value,
            0.7);
}

TEST(GridDP, TwoStepQuad) {
  const auto law = vol_law({0.0, 0.0, 0.5, 1.0});
  const auto w = weights_of(WeightGenerator::ones);
  GridSpec grid;
  grid.L = 8.0;
  grid.nx = 1600;
  const auto r = expect_weighted_sum_grid(law, w, phi::quad(), 2, grid);
  EXPECT_NEAR(r.value, 1.0, 1e-4);
  EXPECT_TRUE(r.reliable);
}

TEST(GridDP, DomainChecks) {
  const auto law = vol_law({0.0, 0.0, 0.5, 1.0});
  const auto ones = weights_of(WeightGenerator::ones);
  GridSpec grid;
  grid.L = 0.5;
  grid.nx = 100;
  EXPECT_THROW(expect_weighted_sum_grid(law, ones, phi::quad(), 16, grid), std::invalid_argument);
  grid.L = 4.0; // exactly the reach: the outermost paths clamp at the edge
  const auto r = expect_weighted_sum_grid(law, ones, phi::quad(), 16, grid);
  EXPECT_GT(r.diagnostics.at("boundary_hits"), 0.0);
  EXPECT_TRUE(expect_weighted_sum_grid(law, ones, phi::quad(), 16,
                                       covering_grid(law, ones, 16, 0.08))
                  .reliable);
}

TEST(GridDP, TreeAgreementImprovesWithSpacing) {
  const auto law = two_point_law({SequenceGenerator::constant, {0.0, 0.2, 0.5, 1.0}, 0.0, {}});
  const auto w = weights_of(WeightGenerator::ones);
  const auto fn = phi::cos_k(1.0);
  for (std::size_t n : {4u, 8u, 12u}) {
    const double exact = expect_weighted_sum_tree(law, w, fn, n).value;
    const double g1 = std::abs(
        expect_weighted_sum_grid(law, w, fn, n, covering_grid(law, w, n, 0.01)).value - exact);
    const double g2 = std::abs(
        expect_weighted_sum_grid(law, w, fn, n, covering_grid(law, w, n, 0.005)).value - exact);
    EXPECT_LE(g1, 0.5 * 0.01);
    EXPECT_LE(g2, 0.5 * g1 * 1.2) << "n = " << n << " gaps " << g1 << " " << g2;
  }
}

TEST(EngineSymmetry, EvenPayoffInvariantUnderNegatedWeights) {
  const auto law = vol_law({0.0, 0.0, 0.4, 1.0});
  WeightSpec pos;
  pos.generator = WeightGenerator::custom_table;
  pos.table = {1.0, 2.0, 0.5, 3.0, 1.5, 0.7};
  WeightSpec neg = pos;
  for (double& v : neg.table)
    v = -v;
  const auto fn = phi::cos_k(1.7);
  for (std::size_t n = 1; n <= 6; ++n)
    EXPECT_NEAR(expect_weighted_sum_tree(law, pos, fn, n).value,
                expect_weighted_sum_tree(law, neg, fn, n).value, 1e-14);
}

TEST(Steps, ScheduleSumsToOne) {
  const auto law = vol_law({0.0, 0.0, 0.5, 1.0});
  for (auto wg : {WeightGenerator::ones, WeightGenerator::identity, WeightGenerator::sqrt,
                  WeightGenerator::geometric}) {
    const auto steps = make_steps(law, weights_of(wg), 200);
    CompensatedSum s;
    for (const auto& st : steps)
      s.add(st.b);
    EXPECT_NEAR(s.value(), 1.0, 1e-14);
  }
}

TEST(AxiomSuite, TreeEvaluatorPasses) {
  const auto law = two_point_law({SequenceGenerator::constant, {-0.1, 0.3, 0.5, 1.0}, 0.0, {}});
  const auto w = weights_of(WeightGenerator::ones);
  const Evaluator eval = [&](const Payoff& f) {
    return expect_weighted_sum_tree(law, w, f, 6).value;
  };
  const auto rep = axiom_suite(eval, default_axiom_catalog(), 60, 42);
  EXPECT_TRUE(rep.passed(1e-9)) << rep.worst();
  EXPECT_EQ(eval([](double) { return 0.0; }), 0.0);
  const auto c = phi::cos_k(1.0);
  EXPECT_NEAR(eval([&](double x) { return c(x) + 0.1; }), eval(c) + 0.1, 1e-14);
}

TEST(Weights, Generators) {
  WeightSpec w;
  EXPECT_EQ(w.weight(5), 1.0);
  w.generator = WeightGenerator::identity;
  EXPECT_EQ(w.weight(5), 5.0);
  w.generator = WeightGenerator::sqrt;
  EXPECT_EQ(w.weight(4), 2.0);
  w.generator = WeightGenerator::geometric;
  EXPECT_EQ(w.weight(3), 8.0);
  w.generator = WeightGenerator::custom_table;
  w.table = {1.0, 0.0};
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.table = {1.0, 2.0};
  EXPECT_THROW(w.weight(3), std::out_of_range);
  WeightSpec bad;
  bad.alpha = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
