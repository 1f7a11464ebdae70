#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pgmsym/domains.hpp"
#include "pgmsym/model.hpp"
#include "support.hpp"

namespace pgmsym {
namespace {

const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);

TEST(EvaluateFeature, DirectLiteralMatch) {
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f;
  f.literals = {Literal{0, 1, true}};
  EXPECT_TRUE(evaluate_feature(g.kind, f, test::make_state({1, 0})));
  EXPECT_FALSE(evaluate_feature(g.kind, f, test::make_state({0, 0})));
}

TEST(EvaluateFeature, NegativeLiteralSatisfiesClause) {
  Feature f;
  f.literals = {Literal{0, 1, true}, Literal{1, 0, false}};  // a=1 or b!=0
  EXPECT_TRUE(evaluate_feature(FeatureKind::clausal, f, test::make_state({0, 1})));
  EXPECT_FALSE(evaluate_feature(FeatureKind::clausal, f, test::make_state({0, 0})));
}

TEST(EvaluateFeature, MultiValuedClause) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const Feature& f = g.features[1];  // b=1 or b=2
  EXPECT_FALSE(evaluate_feature(g.kind, f, test::make_state({0, 0})));
  EXPECT_TRUE(evaluate_feature(g.kind, f, test::make_state({0, 2})));
}

TEST(EvaluateFeature, ConjunctiveNeedsAllLiterals) {
  Feature f;
  f.literals = {Literal{0, 1, true}, Literal{1, 0, true}};
  EXPECT_TRUE(evaluate_feature(FeatureKind::conjunctive, f, test::make_state({1, 0})));
  EXPECT_FALSE(evaluate_feature(FeatureKind::conjunctive, f, test::make_state({1, 1})));
}

TEST(LogWeight, BothFeaturesSatisfied) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  EXPECT_NEAR(log_weight(g, test::make_state({1, 1})), 2 * kLn2, 1e-15);
}

TEST(LogWeight, EmptyFeatureSetIsZero) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 2}};
  EXPECT_EQ(log_weight(g, test::make_state({0})), 0.0);
}

TEST(LogWeight, OnlyFirstClauseSatisfied) {
  const GraphicalModel g = toy_g1(kLn2, kLn3);
  EXPECT_NEAR(log_weight(g, test::make_state({1, 0})), kLn2, 1e-15);
}

TEST(LogWeight, HardPolicies) {
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}};
  Feature f;
  f.weight = hard_weight_sentinel();
  f.literals = {Literal{0, 1, true}};
  g.features = {f};
  EXPECT_EQ(log_weight(g, test::make_state({0}), HardPolicy::exact_infinity()),
            -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_weight(g, test::make_state({1}), HardPolicy::exact_infinity()), 0.0);
  EXPECT_NEAR(log_weight(g, test::make_state({1}), HardPolicy::soft(30.0)), 30.0, 1e-15);
  EXPECT_EQ(log_weight(g, test::make_state({0}), HardPolicy::soft(30.0)), 0.0);
}

TEST(ExactDistribution, ToyNecModel) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ExactDistribution d = exact_distribution(g);
  auto p = [&](int a, int b) { return d.p[d.indexer.encode(test::make_state({a, b}))]; };
  EXPECT_NEAR(p(0, 0), 1.0 / 15, 1e-12);
  EXPECT_NEAR(p(1, 0), 2.0 / 15, 1e-12);
  EXPECT_NEAR(p(0, 1), 2.0 / 15, 1e-12);
  EXPECT_NEAR(p(0, 2), 2.0 / 15, 1e-12);
  EXPECT_NEAR(p(1, 1), 4.0 / 15, 1e-12);
  EXPECT_NEAR(p(1, 2), 4.0 / 15, 1e-12);
  double total = 0.0;
  for (double x : d.p) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ExactDistribution, SingleBooleanNoFeatures) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 2}};
  const ExactDistribution d = exact_distribution(g);
  EXPECT_NEAR(d.p[0], 0.5, 1e-15);
  EXPECT_NEAR(d.p[1], 0.5, 1e-15);
}

TEST(ExactDistribution, ToyG1) {
  const GraphicalModel g = toy_g1(kLn2, kLn3);
  const ExactDistribution d = exact_distribution(g);
  auto p = [&](int a, int b) { return d.p[d.indexer.encode(test::make_state({a, b}))]; };
  EXPECT_NEAR(p(0, 0), 6.0 / 17, 1e-12);
  EXPECT_NEAR(p(1, 1), 6.0 / 17, 1e-12);
  EXPECT_NEAR(p(1, 0), 2.0 / 17, 1e-12);
  EXPECT_NEAR(p(0, 1), 3.0 / 17, 1e-12);
}

TEST(ExactDistribution, CapEnforced) {
  GraphicalModel g;
  for (int i = 0; i < 24; ++i) g.variables.push_back(Variable{i, "v" + std::to_string(i), 2});
  EXPECT_THROW(exact_distribution(g, HardPolicy::exact_infinity(), 1 << 20), StateSpaceTooLarge);
}

TEST(ExactDistribution, TrulyHardZeroesViolations) {
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f;
  f.weight = hard_weight_sentinel();
  f.literals = {Literal{0, 1, true}};
  g.features = {f};
  const ExactDistribution d = exact_distribution(g);
  EXPECT_EQ(d.p[d.indexer.encode(test::make_state({0, 0}))], 0.0);
  EXPECT_NEAR(d.p[d.indexer.encode(test::make_state({1, 0}))], 0.5, 1e-12);
}

TEST(ExactMarginals, ToyNecModel) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const auto m = exact_marginals(g);
  EXPECT_NEAR(m[0][1], 10.0 / 15, 1e-12);
  for (const auto& row : m) {
    double total = 0.0;
    for (double x : row) total += x;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(ExactMarginals, ToyG1JointDerived) {
  const auto m = exact_marginals(toy_g1(kLn2, kLn3));
  EXPECT_NEAR(m[0][1], 8.0 / 17, 1e-12);
}

TEST(ExactMarginals, NoFeaturesUniform) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 3}};
  const auto m = exact_marginals(g);
  EXPECT_NEAR(m[0][0], 0.5, 1e-12);
  EXPECT_NEAR(m[1][2], 1.0 / 3, 1e-12);
}

TEST(ExactMarginals, EqualWeightsMakeHalfMarginals) {
  const auto m = exact_marginals(toy_g2(0.8, 0.8));
  EXPECT_NEAR(m[0][1], 0.5, 1e-12);
  EXPECT_NEAR(m[1][0], 0.5, 1e-12);
}

TEST(Canonical, SortsAndDeduplicatesLiterals) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f;
  f.weight = 1.0;
  f.literals = {Literal{1, 1, true}, Literal{0, 0, true}, Literal{1, 1, true}};
  g.features = {f};
  const GraphicalModel c = canonical(g);
  ASSERT_EQ(c.features[0].literals.size(), 2u);
  EXPECT_EQ(c.features[0].literals[0].var, 0);
  EXPECT_EQ(c.features[0].literals[1].var, 1);
}

TEST(Canonical, NormalizesEquivalentSpellings) {
  // a clause admits the union of its literals' value sets
  const GraphicalModel a = parse_model("var v0 3\nvar v1 2\nfeature 1 v1=1 v0=1 !v0=0\n");
  const GraphicalModel b = parse_model("var v0 3\nvar v1 2\nfeature 1 v0=1 v0=2 !v1=0\n");
  EXPECT_TRUE(canonical_equal(a, b));
  // a conjunction admits the intersection
  const GraphicalModel c = parse_model("mode conjunctive\nvar v2 3\nfeature 1 v2=1 !v2=0\n");
  const GraphicalModel d = parse_model("mode conjunctive\nvar v2 3\nfeature 1 v2=1\n");
  EXPECT_TRUE(canonical_equal(c, d));
  const GraphicalModel e = parse_model("mode conjunctive\nvar v2 3\nfeature 1 !v2=0\n");
  EXPECT_FALSE(canonical_equal(c, e));
}

TEST(Canonical, EqualityIgnoresFeatureOrder) {
  GraphicalModel a = toy_g1(kLn2, kLn3);
  GraphicalModel b = a;
  std::swap(b.features[0], b.features[1]);
  EXPECT_TRUE(canonical_equal(a, b));
  b.features[0].weight += 0.5;
  EXPECT_FALSE(canonical_equal(a, b));
}

TEST(Parser, RoundTripIsStable) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const GraphicalModel g = test::random_model(rng, 4, 3, 5, true);
    const GraphicalModel back = parse_model(serialize_model(g));
    EXPECT_TRUE(canonical_equal(g, back)) << serialize_model(g);
  }
}

TEST(Parser, RejectsUndeclaredVariable) {
  try {
    parse_model("mode clausal\nvar a 2\nfeature 1.0 a=1 c=0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("unknown variable"), std::string::npos);
  }
}

TEST(Parser, RejectsOutOfRangeValue) {
  try {
    parse_model("var a 2\nfeature 1.0 a=2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Parser, RejectsBadWeightAndEmptyFeature) {
  EXPECT_THROW(parse_model("var a 2\nfeature abc a=1\n"), ParseError);
  EXPECT_THROW(parse_model("var a 2\nfeature 1.0\n"), ParseError);
  EXPECT_THROW(parse_model("var a 2\nvar a 3\n"), ParseError);
}

TEST(Parser, HardWeightAndComments) {
  const GraphicalModel g = parse_model("# model\nmode clausal\nvar a 2\nfeature HARD a=1  # pin\n");
  ASSERT_EQ(g.features.size(), 1u);
  EXPECT_TRUE(is_hard(g.features[0].weight));
}

TEST(ExactDistribution, RandomModelsNormalize) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const GraphicalModel g = test::random_model(rng, 4, 3, 5, false);
    const ExactDistribution d = exact_distribution(g);
    double total = 0.0;
    for (double x : d.p) total += x;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(DeMorganDual, SameDistributionUpToConstant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    GraphicalModel g = test::random_model(rng, 3, 3, 4, false);
    g.kind = FeatureKind::clausal;
    if (g.features.empty()) continue;
    const GraphicalModel dual = demorgan_dual(g);
    const StateIndexer idx(g);
    double ratio = 0.0;
    bool have = false;
    for (std::uint64_t i = 0; i < idx.size(); ++i) {
      const State s = idx.decode(i);
      const double diff = log_weight(g, s) - log_weight(dual, s);
      if (!have) {
        ratio = diff;
        have = true;
      } else {
        EXPECT_NEAR(diff, ratio, 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace pgmsym
