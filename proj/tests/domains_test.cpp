#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pgmsym/autograph.hpp"
#include "pgmsym/domains.hpp"
#include "pgmsym/reduction.hpp"
#include "support.hpp"

namespace pgmsym {
namespace {

const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);

TEST(Ring, UnrenamedStructure) {
  const GraphicalModel g = gen_ring(RingSpec{4, kLn2, kLn3, 0.0, 0});
  ASSERT_EQ(g.var_count(), 4);
  ASSERT_EQ(g.feature_count(), 4);
  // person i: (x_i = 0 or x_{i+1} = 1), weights alternating
  EXPECT_EQ(g.features[0].literals[0], (Literal{0, 0, true}));
  EXPECT_EQ(g.features[0].literals[1], (Literal{1, 1, true}));
  EXPECT_NEAR(g.features[0].weight, kLn2, 1e-15);
  EXPECT_NEAR(g.features[1].weight, kLn3, 1e-15);
  EXPECT_EQ(g.features[3].literals[1], (Literal{0, 1, true}));
}

TEST(Ring, ValidatesSpec) {
  EXPECT_THROW(gen_ring(RingSpec{3, 1, 1, 0, 0}), ValidationError);
  EXPECT_THROW(gen_ring(RingSpec{6, 1, 1, 1.5, 0}), ValidationError);
}

TEST(Ring, EqualWeightsAdmitRotationByOne) {
  const GraphicalModel g = gen_ring(RingSpec{4, kLn2, kLn2, 0.0, 0});
  const GeneratorSet gens = variable_symmetry_generators(g);
  const auto closure = group_closure(gens);
  EXPECT_NE(std::find(closure.begin(), closure.end(), Permutation({1, 2, 3, 0})), closure.end());
}

TEST(Ring, UnequalWeightsAdmitRotationByTwo) {
  const GraphicalModel g = gen_ring(RingSpec{4, kLn2, kLn3, 0.0, 0});
  const GeneratorSet gens = variable_symmetry_generators(g);
  const auto closure = group_closure(gens);
  EXPECT_EQ(std::find(closure.begin(), closure.end(), Permutation({1, 2, 3, 0})), closure.end());
  EXPECT_NE(std::find(closure.begin(), closure.end(), Permutation({2, 3, 0, 1})), closure.end());
}

TEST(Ring, DeterministicGivenSeed) {
  const GraphicalModel a = gen_ring(RingSpec{8, kLn2, kLn3, 0.5, 42});
  const GraphicalModel b = gen_ring(RingSpec{8, kLn2, kLn3, 0.5, 42});
  EXPECT_EQ(serialize_model(a), serialize_model(b));
  const GraphicalModel c = gen_ring(RingSpec{8, kLn2, kLn3, 0.5, 43});
  EXPECT_NE(serialize_model(a), serialize_model(c));
}

TEST(Ring, RenamingPreservesVvGroupOrder) {
  for (const int n : {4, 8, 16}) {
    const GraphicalModel base = gen_ring(RingSpec{n, kLn2, kLn3, 0.0, 0});
    const VVLayout layout = VVLayout::of(base);
    GeneratorSet base_gens{layout.total, {}};
    for (const VVPermutation& phi : vv_symmetry_generators(base)) base_gens.generators.push_back(phi.perm());
    const std::size_t base_order = group_closure(base_gens).size();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const GraphicalModel renamed = gen_ring(RingSpec{n, kLn2, kLn3, 0.4, seed});
      GeneratorSet gens{layout.total, {}};
      for (const VVPermutation& phi : vv_symmetry_generators(renamed)) gens.generators.push_back(phi.perm());
      EXPECT_EQ(group_closure(gens).size(), base_order) << "n=" << n << " seed=" << seed;
    }
  }
}

TEST(Ring, RenamedRingLosesVariableSymmetries) {
  // seed chosen so the renaming pattern is not rotation-invariant
  const GraphicalModel g = gen_ring(RingSpec{8, kLn2, kLn3, 0.4, 1});
  const GeneratorSet gens = variable_symmetry_generators(g);
  EXPECT_TRUE(gens.generators.empty());
}

TEST(Curriculum, VariableLayout) {
  CurriculumSpec spec;
  spec.n_students = 1;
  spec.areas = {2, 3};
  spec.fail_weights = {0.5};
  const GraphicalModel g = gen_curriculum(spec);
  ASSERT_EQ(g.var_count(), 3);
  EXPECT_EQ(g.variables[0].name, "p_s0_a0");
  EXPECT_EQ(g.variables[0].cardinality, 3);
  EXPECT_EQ(g.variables[1].cardinality, 4);
  EXPECT_EQ(g.variables[2].name, "c_s0_a0_a1");
  EXPECT_EQ(g.variables[2].cardinality, 2);
  // 2 fail clauses + 3 hard + 1 completion bonus
  EXPECT_EQ(g.feature_count(), 6);
}

TEST(Curriculum, HardClausesTieCompletionToPasses) {
  CurriculumSpec spec;
  spec.n_students = 1;
  spec.areas = {2, 2};
  spec.fail_weights = {0.5};
  const GraphicalModel g = gen_curriculum(spec);
  const ExactDistribution d = exact_distribution(g);
  for (std::uint64_t i = 0; i < d.indexer.size(); ++i) {
    const State s = d.indexer.decode(i);
    const bool both_pass = s.values[0] != 0 && s.values[1] != 0;
    const bool completed = s.values[2] == 1;
    if (completed != both_pass) {
      EXPECT_EQ(d.p[i], 0.0);
    }
  }
}

TEST(Curriculum, ValidatesSpec) {
  CurriculumSpec bad;
  bad.n_students = 1;
  bad.areas = {2};
  bad.fail_weights = {0.5};
  EXPECT_THROW(gen_curriculum(bad), ValidationError);
  bad.areas = {2, 3};
  bad.fail_weights = {};
  EXPECT_THROW(gen_curriculum(bad), ValidationError);
}

TEST(Toys, MatchPrintedForms) {
  const GraphicalModel g1 = toy_g1(kLn2, kLn3);
  EXPECT_EQ(g1.var_count(), 2);
  EXPECT_EQ(g1.feature_count(), 2);
  EXPECT_EQ(g1.kind, FeatureKind::clausal);

  const GraphicalModel g2 = toy_g2(0.9, 0.4);
  EXPECT_EQ(g2.kind, FeatureKind::conjunctive);
  EXPECT_EQ(g2.feature_count(), 4);
  EXPECT_NEAR(g2.features[0].weight, 0.9, 1e-15);  // agreeing state 00
  EXPECT_NEAR(g2.features[1].weight, 0.4, 1e-15);

  const GraphicalModel g3 = toy_g3_nec(kLn2);
  EXPECT_EQ(g3.cardinality(0), 2);
  EXPECT_EQ(g3.cardinality(1), 3);

  const GraphicalModel x = toy_xor(0.8);
  EXPECT_EQ(x.feature_count(), 2);
  EXPECT_EQ(x.kind, FeatureKind::conjunctive);
}

TEST(Binarize, KeepsBooleansAndSplitsMultiValued) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const BinarizedModel bin = binarize(g);
  // a stays, b becomes three indicator bits
  EXPECT_EQ(bin.model.var_count(), 4);
  EXPECT_EQ(bin.passthrough[0], 0);
  EXPECT_EQ(bin.passthrough[1], -1);
  EXPECT_EQ(bin.model.variables[1].name, "b@0");
  // original 2 features + 1 at-least-one + 3 at-most-one
  EXPECT_EQ(bin.model.feature_count(), 6);
}

TEST(Binarize, ExactMarginalsFoldBack) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const BinarizedModel bin = binarize(g);
  const auto folded = fold_binarized_marginals(bin, g, exact_marginals(bin.model));
  const auto direct = exact_marginals(g);
  for (std::size_t i = 0; i < direct.size(); ++i)
    for (std::size_t v = 0; v < direct[i].size(); ++v) EXPECT_NEAR(folded[i][v], direct[i][v], 1e-12);
}

TEST(Binarize, CurriculumValueSwapsSurviveAsVariableSymmetries) {
  CurriculumSpec spec;
  spec.n_students = 1;
  spec.areas = {2, 3};
  spec.fail_weights = {0.5};
  const GraphicalModel g = gen_curriculum(spec);
  const BinarizedModel bin = binarize(g);
  const GeneratorSet gens = variable_symmetry_generators(bin.model);
  // swapping the two course bits of area 0 must appear
  const auto closure = group_closure(gens);
  bool course_swap = false;
  for (const Permutation& p : closure)
    if (p(bin.value_var[0][1]) == bin.value_var[0][2] && p(bin.value_var[0][2]) == bin.value_var[0][1])
      course_swap = true;
  EXPECT_TRUE(course_swap);
}

}  // namespace
}  // namespace pgmsym
