#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "pgmsym/domains.hpp"
#include "pgmsym/reduction.hpp"
#include "support.hpp"

namespace pgmsym {
namespace {

const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);

TEST(ValueSwapClasses, ToyG3MergesPassingValues) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ValueClasses classes = value_swap_classes(g);
  EXPECT_EQ(classes.num_classes(0), 2);
  EXPECT_EQ(classes.num_classes(1), 2);
  EXPECT_EQ(classes.rep(1, 1), 1);
  EXPECT_EQ(classes.rep(1, 2), 1);
  EXPECT_EQ(classes.rep(1, 0), 0);
}

TEST(ValueSwapClasses, NoFeaturesMergesEverything) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 3}, Variable{1, "b", 4}};
  const ValueClasses classes = value_swap_classes(g);
  EXPECT_EQ(classes.num_classes(0), 1);
  EXPECT_EQ(classes.num_classes(1), 1);
  EXPECT_EQ(classes.class_size(1, 2), 4);
}

TEST(ValueSwapClasses, ToyG1AllSingletons) {
  const ValueClasses classes = value_swap_classes(toy_g1(kLn2, kLn3));
  EXPECT_EQ(classes.num_classes(0), 2);
  EXPECT_EQ(classes.num_classes(1), 2);
}

TEST(ValueSwapClasses, SameClassPairsAreSymmetriesCrossClassAreNot) {
  for (const GraphicalModel& g : {toy_g3_nec(kLn2), toy_g1(kLn2, kLn3)}) {
    const ValueClasses classes = value_swap_classes(g);
    const VVLayout layout = VVLayout::of(g);
    for (int i = 0; i < g.var_count(); ++i)
      for (int v = 0; v < g.cardinality(i); ++v)
        for (int w = v + 1; w < g.cardinality(i); ++w) {
          const bool same = classes.class_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] ==
                            classes.class_of[static_cast<std::size_t>(i)][static_cast<std::size_t>(w)];
          EXPECT_EQ(is_vv_symmetry(g, value_swap_permutation(layout, i, v, w)), same);
        }
  }
}

TEST(ReduceModel, ToyG3DropsNonRepresentativeValue) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  EXPECT_EQ(r.model.cardinality(0), 2);
  EXPECT_EQ(r.model.cardinality(1), 2);
  GraphicalModel expected;
  expected.kind = FeatureKind::clausal;
  expected.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f1, f2;
  f1.weight = f2.weight = kLn2;
  f1.literals = {Literal{0, 1, true}};
  f2.literals = {Literal{1, 1, true}};
  expected.features = {f1, f2};
  EXPECT_TRUE(canonical_equal(r.model, expected));
}

TEST(ReduceModel, SingletonClassesKeepModel) {
  const GraphicalModel g = toy_g1(kLn2, kLn3);
  const ReducedModel r = reduce_model(g, ValueClasses::all_singletons(g));
  EXPECT_TRUE(canonical_equal(r.model, g));
}

TEST(ReduceModel, NoFeaturesGivesUnitDomains) {
  GraphicalModel g;
  g.variables = {Variable{0, "a", 3}, Variable{1, "b", 2}};
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  EXPECT_EQ(r.model.cardinality(0), 1);
  EXPECT_EQ(r.model.cardinality(1), 1);
  EXPECT_TRUE(r.model.features.empty());
}

TEST(ReduceModel, NegativeLiteralOnMergedValueDropsClause) {
  // (a != 1) is constantly true once value 1 merges into value 0's class
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature keep;
  keep.weight = 0.7;
  keep.literals = {Literal{1, 1, true}};
  Feature drop;
  drop.weight = 1.3;
  drop.literals = {Literal{0, 1, false}, Literal{1, 1, true}};
  g.features = {keep, drop};
  ValueClasses classes = ValueClasses::all_singletons(g);
  classes.class_of[0] = {0, 0};
  classes.members[0] = {{0, 1}};
  const ReducedModel r = reduce_model(g, classes);
  ASSERT_EQ(r.model.features.size(), 1u);
  EXPECT_NEAR(r.dropped_log_weight, 1.3, 1e-15);
}

TEST(KRatio, ToyG3IsFiveThirds) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  EXPECT_NEAR(k_ratio(g, r), 5.0 / 3.0, 1e-9);
}

TEST(KRatio, IdentityReductionIsOne) {
  const GraphicalModel g = toy_g1(kLn2, kLn3);
  const ReducedModel r = reduce_model(g, ValueClasses::all_singletons(g));
  EXPECT_NEAR(k_ratio(g, r), 1.0, 1e-12);
}

TEST(KRatio, AtLeastOneOnSuiteModels) {
  for (const GraphicalModel& g : {toy_g3_nec(kLn2), toy_g1(kLn2, kLn3), toy_g2(0.9, 0.4)}) {
    const ReducedModel r = reduce_model(g, value_swap_classes(g));
    EXPECT_GE(k_ratio(g, r), 1.0 - 1e-12);
  }
}

TEST(RepState, ReplacesByClassRepresentative) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ValueClasses classes = value_swap_classes(g);
  EXPECT_EQ(rep_state(test::make_state({1, 2}), classes), test::make_state({1, 1}));
  EXPECT_EQ(rep_state(test::make_state({1, 1}), classes), test::make_state({1, 1}));
  EXPECT_EQ(rep_state(test::make_state({0, 0}), classes), test::make_state({0, 0}));
  // idempotent
  const State r = rep_state(test::make_state({0, 2}), classes);
  EXPECT_EQ(rep_state(r, classes), r);
}

TEST(SuborbitSize, ProductOfClassSizes) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ValueClasses classes = value_swap_classes(g);
  EXPECT_EQ(suborbit_size(test::make_state({0, 1}), classes), 2u);
  EXPECT_EQ(suborbit_size(test::make_state({1, 0}), classes), 1u);
  EXPECT_EQ(per_variable_suborbit(test::make_state({0, 1}), 1, classes), 2u);
  EXPECT_EQ(per_variable_suborbit(test::make_state({0, 1}), 0, classes), 1u);
  const ValueClasses singletons = ValueClasses::all_singletons(g);
  EXPECT_EQ(suborbit_size(test::make_state({1, 2}), singletons), 1u);
}

TEST(SuborbitSize, MatchesBruteForceCount) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ValueClasses classes = value_swap_classes(g);
  const StateIndexer idx(g);
  std::uint64_t rep_total = 0;
  for (std::uint64_t i = 0; i < idx.size(); ++i) {
    const State s = idx.decode(i);
    const State rs = rep_state(s, classes);
    std::uint64_t count = 0;
    for (std::uint64_t j = 0; j < idx.size(); ++j)
      if (rep_state(idx.decode(j), classes) == rs) ++count;
    EXPECT_EQ(suborbit_size(s, classes), count);
    if (s == rs) rep_total += suborbit_size(s, classes);
  }
  // representative suborbits tile the state space
  EXPECT_EQ(rep_total, idx.size());
}

TEST(ReducedSymmetries, ToyG3GainsVariableSwap) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  const auto gens = reduced_vv_symmetries(r);
  ASSERT_FALSE(gens.empty());
  const VVLayout layout = VVLayout::of(r.model);
  GeneratorSet set{layout.total, {}};
  for (const VVPermutation& phi : gens) set.generators.push_back(phi.perm());
  EXPECT_EQ(group_closure(set).size(), 2u);
  // the straight swap (a.v -> b.v) generates it
  bool straight = false;
  for (const VVPermutation& phi : gens)
    if (phi.map_index(layout.index(0, 0)) == layout.index(1, 0) &&
        phi.map_index(layout.index(0, 1)) == layout.index(1, 1))
      straight = true;
  EXPECT_TRUE(straight);
}

TEST(ApplyNec, WorkedToyG3Move) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  const VVLayout layout = VVLayout::of(r.model);
  const VVPermutation swap = VVPermutation::checked(layout, Permutation({2, 3, 0, 1}));
  // (a=1, b=0) -> representative (1,0) -> swapped (0,1) -> choose b=2
  EXPECT_EQ(apply_nec(r, swap, test::make_state({1, 0}), {0, 2}), test::make_state({0, 2}));
  // identity everywhere gives the state back
  EXPECT_EQ(apply_nec(r, VVPermutation::identity(layout), test::make_state({1, 0}), {1, 0}),
            test::make_state({1, 0}));
  // identity map with the swap choice b: 2 -> 1
  EXPECT_EQ(apply_nec(r, VVPermutation::identity(layout), test::make_state({1, 2}), {1, 1}),
            test::make_state({1, 1}));
  // choices outside the class are rejected
  EXPECT_THROW(apply_nec(r, swap, test::make_state({1, 0}), {0, 0}), InvalidPermutation);
}

TEST(ApplyNec, PreservesExactProbability) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  const auto gens = reduced_vv_symmetries(r);
  const ExactDistribution d = exact_distribution(g);
  std::mt19937_64 rng(33);
  for (const VVPermutation& phi : gens)
    for (std::uint64_t i = 0; i < d.indexer.size(); ++i)
      for (int rep = 0; rep < 5; ++rep) {
        const State s = d.indexer.decode(i);
        const State t = apply_nec_uniform(r, phi, s, rng);
        EXPECT_NEAR(d.p[i], d.p[d.indexer.encode(t)], 1e-12);
      }
}

TEST(NecOrbits, ToyG3Partition) {
  const GraphicalModel g = toy_g3_nec(kLn2);
  const ReducedModel r = reduce_model(g, value_swap_classes(g));
  const auto gens = reduced_vv_symmetries(r);
  const auto orbit_of = [&](std::initializer_list<int> values) {
    std::set<State> out;
    for (const State& s : nec_orbit_of_state(r, gens, test::make_state(values))) out.insert(s);
    return out;
  };
  EXPECT_EQ(orbit_of({0, 0}), (std::set<State>{test::make_state({0, 0})}));
  EXPECT_EQ(orbit_of({1, 0}), (std::set<State>{test::make_state({1, 0}), test::make_state({0, 1}),
                                               test::make_state({0, 2})}));
  EXPECT_EQ(orbit_of({1, 1}), (std::set<State>{test::make_state({1, 1}), test::make_state({1, 2})}));
}

TEST(Curriculum, PassValuesMergeAndAreasAlign) {
  CurriculumSpec spec;
  spec.n_students = 1;
  spec.areas = {2, 3};
  spec.fail_weights = {0.5};
  const GraphicalModel g = gen_curriculum(spec);
  const ValueClasses classes = value_swap_classes(g);
  // p_s0_a0 has domain {fail, c1, c2}: passing values merge
  EXPECT_EQ(classes.num_classes(0), 2);
  EXPECT_EQ(classes.class_size(0, 1), 2);
  // p_s0_a1 has domain {fail, c1, c2, c3}
  EXPECT_EQ(classes.num_classes(1), 2);
  EXPECT_EQ(classes.class_size(1, 1), 3);

  const ReducedModel r = reduce_model(g, classes);
  EXPECT_EQ(r.model.cardinality(0), 2);
  EXPECT_EQ(r.model.cardinality(1), 2);
  // with domains equalized the two areas can trade places
  const auto gens = reduced_vv_symmetries(r);
  const VVLayout layout = VVLayout::of(r.model);
  GeneratorSet set{layout.total, {}};
  for (const VVPermutation& phi : gens) set.generators.push_back(phi.perm());
  bool areas_swap = false;
  for (const Permutation& p : group_closure(set))
    if (layout.var(p(layout.index(0, 0))) == 1) areas_swap = true;
  EXPECT_TRUE(areas_swap);
}

}  // namespace
}  // namespace pgmsym
