#ifndef PGMSYM_DOMAINS_HPP
#define PGMSYM_DOMAINS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"

namespace pgmsym {

// N people alternating male/female around a ring, each passing a bit to the
// next: a clause (x_i=0 or x_{i+1}=1) per person, weight by the sender's sex.
// Each variable is independently value-renamed (all its literals flipped) with
// probability rename_prob, which hides the rotational structure from anything
// that cannot trade values.
struct RingSpec {
  int n_people = 4;
  double w_male = std::log(2.0);
  double w_female = std::log(3.0);
  double rename_prob = 0.0;
  std::uint64_t seed = 0;
};

inline GraphicalModel gen_ring(const RingSpec& spec) {
  if (spec.n_people < 4 || spec.n_people % 2 != 0)
    throw ValidationError("ring needs an even number of people, at least 4");
  if (spec.rename_prob < 0.0 || spec.rename_prob > 1.0)
    throw ValidationError("rename probability must be in [0, 1]");
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  for (int i = 0; i < spec.n_people; ++i)
    g.variables.push_back(Variable{i, "x" + std::to_string(i + 1), 2});
  for (int i = 0; i < spec.n_people; ++i) {
    Feature f;
    f.weight = i % 2 == 0 ? spec.w_male : spec.w_female;
    f.literals.push_back(Literal{i, 0, true});
    f.literals.push_back(Literal{(i + 1) % spec.n_people, 1, true});
    g.features.push_back(std::move(f));
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < spec.n_people; ++i) {
    if (unit(rng) >= spec.rename_prob) continue;
    for (Feature& f : g.features)
      for (Literal& l : f.literals)
        if (l.var == i) l.value = 1 - l.value;
  }
  return g;
}

// K students fulfilling a breadth requirement: pass one course each in two
// areas. P_{s,a} is 0 on failure or the index of the passed course; C_{s,a,a'}
// marks completion via areas a and a'. Hard clauses tie C to the two passes;
// failing carries a per-student weight, completing carries a bonus.
struct CurriculumSpec {
  int n_students = 2;
  std::vector<int> areas;            // courses per area
  std::vector<double> fail_weights;  // one per student
  double completion_weight = 0.7;
};

inline GraphicalModel gen_curriculum(const CurriculumSpec& spec) {
  if (spec.n_students < 1) throw ValidationError("need at least one student");
  if (spec.areas.size() < 2) throw ValidationError("need at least two areas");
  for (int n : spec.areas)
    if (n < 1) throw ValidationError("each area needs at least one course");
  if (static_cast<int>(spec.fail_weights.size()) != spec.n_students)
    throw ValidationError("need one fail weight per student");

  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  const int n_areas = static_cast<int>(spec.areas.size());
  std::vector<std::vector<int>> pass_var(static_cast<std::size_t>(spec.n_students),
                                         std::vector<int>(static_cast<std::size_t>(n_areas)));
  auto add_var = [&g](const std::string& name, int card) {
    const int id = g.var_count();
    g.variables.push_back(Variable{id, name, card});
    return id;
  };
  for (int s = 0; s < spec.n_students; ++s)
    for (int a = 0; a < n_areas; ++a)
      pass_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
          add_var("p_s" + std::to_string(s) + "_a" + std::to_string(a),
                  spec.areas[static_cast<std::size_t>(a)] + 1);

  for (int s = 0; s < spec.n_students; ++s) {
    for (int a = 0; a < n_areas; ++a) {
      Feature fail;
      fail.weight = spec.fail_weights[static_cast<std::size_t>(s)];
      fail.literals.push_back(Literal{pass_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)], 0, true});
      g.features.push_back(std::move(fail));
    }
    for (int a = 0; a < n_areas; ++a) {
      for (int a2 = a + 1; a2 < n_areas; ++a2) {
        const int c = add_var("c_s" + std::to_string(s) + "_a" + std::to_string(a) + "_a" + std::to_string(a2), 2);
        const int pa = pass_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
        const int pa2 = pass_var[static_cast<std::size_t>(s)][static_cast<std::size_t>(a2)];
        Feature completed_needs_a;
        completed_needs_a.weight = hard_weight_sentinel();
        completed_needs_a.literals.push_back(Literal{c, 1, false});
        completed_needs_a.literals.push_back(Literal{pa, 0, false});
        g.features.push_back(std::move(completed_needs_a));
        Feature completed_needs_a2;
        completed_needs_a2.weight = hard_weight_sentinel();
        completed_needs_a2.literals.push_back(Literal{c, 1, false});
        completed_needs_a2.literals.push_back(Literal{pa2, 0, false});
        g.features.push_back(std::move(completed_needs_a2));
        Feature passes_imply_completed;
        passes_imply_completed.weight = hard_weight_sentinel();
        passes_imply_completed.literals.push_back(Literal{c, 1, true});
        passes_imply_completed.literals.push_back(Literal{pa, 0, true});
        passes_imply_completed.literals.push_back(Literal{pa2, 0, true});
        g.features.push_back(std::move(passes_imply_completed));
        Feature bonus;
        bonus.weight = spec.completion_weight;
        bonus.literals.push_back(Literal{c, 1, true});
        g.features.push_back(std::move(bonus));
      }
    }
  }
  return g;
}

// Two clauses with distinct weights: (a or not b), (not a or b).
inline GraphicalModel toy_g1(double w1, double w2) {
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f1;
  f1.weight = w1;
  f1.literals = {Literal{0, 1, true}, Literal{1, 0, true}};
  Feature f2;
  f2.weight = w2;
  f2.literals = {Literal{0, 0, true}, Literal{1, 1, true}};
  g.features = {f1, f2};
  return g;
}

// One conjunctive indicator per state of two Booleans, weighted w_same on the
// agreeing states and w_diff on the others.
inline GraphicalModel toy_g2(double w_same, double w_diff) {
  GraphicalModel g;
  g.kind = FeatureKind::conjunctive;
  g.variables = {Variable{0, "x1", 2}, Variable{1, "x2", 2}};
  for (int v1 = 0; v1 < 2; ++v1)
    for (int v2 = 0; v2 < 2; ++v2) {
      Feature f;
      f.weight = v1 == v2 ? w_same : w_diff;
      f.literals = {Literal{0, v1, true}, Literal{1, v2, true}};
      g.features.push_back(std::move(f));
    }
  return g;
}

// Domains of size 2 and 3 with equal-weight features (a=1) and (b=1 or b=2);
// the two passing values of b are swappable, and after merging them a and b
// trade places.
inline GraphicalModel toy_g3_nec(double w) {
  GraphicalModel g;
  g.kind = FeatureKind::clausal;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 3}};
  Feature f1;
  f1.weight = w;
  f1.literals = {Literal{0, 1, true}};
  Feature f2;
  f2.weight = w;
  f2.literals = {Literal{1, 1, true}, Literal{1, 2, true}};
  g.features = {f1, f2};
  return g;
}

// Exclusive-or of two Booleans as two conjunctive indicators of equal weight.
inline GraphicalModel toy_xor(double w) {
  GraphicalModel g;
  g.kind = FeatureKind::conjunctive;
  g.variables = {Variable{0, "a", 2}, Variable{1, "b", 2}};
  Feature f1;
  f1.weight = w;
  f1.literals = {Literal{0, 1, true}, Literal{1, 0, true}};
  Feature f2;
  f2.weight = w;
  f2.literals = {Literal{0, 0, true}, Literal{1, 1, true}};
  g.features = {f1, f2};
  return g;
}

// One Boolean per value plus hard exactly-one clauses, for every variable with
// more than two values. Literals are rewritten through the indicator bits.
struct BinarizedModel {
  GraphicalModel model;
  std::vector<std::vector<int>> value_var;  // [orig var][value] -> indicator var, empty if kept
  std::vector<int> passthrough;             // [orig var] -> kept var id, -1 if binarized
};

inline BinarizedModel binarize(const GraphicalModel& g) {
  BinarizedModel out;
  out.model.kind = g.kind;
  out.value_var.resize(g.variables.size());
  out.passthrough.assign(g.variables.size(), -1);
  auto add_var = [&out](const std::string& name, int card) {
    const int id = out.model.var_count();
    out.model.variables.push_back(Variable{id, name, card});
    return id;
  };
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    const Variable& v = g.variables[i];
    if (v.cardinality <= 2) {
      out.passthrough[i] = add_var(v.name, v.cardinality);
      continue;
    }
    for (int val = 0; val < v.cardinality; ++val)
      out.value_var[i].push_back(add_var(v.name + "@" + std::to_string(val), 2));
  }
  auto rewrite = [&out](const Literal& l) {
    if (out.passthrough[static_cast<std::size_t>(l.var)] >= 0)
      return Literal{out.passthrough[static_cast<std::size_t>(l.var)], l.value, l.positive};
    return Literal{out.value_var[static_cast<std::size_t>(l.var)][static_cast<std::size_t>(l.value)], 1,
                   l.positive};
  };
  for (const Feature& f : g.features) {
    Feature nf;
    nf.weight = f.weight;
    for (const Literal& l : f.literals) nf.literals.push_back(rewrite(l));
    out.model.features.push_back(std::move(nf));
  }
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    if (out.passthrough[i] >= 0) continue;
    const auto& bits = out.value_var[i];
    Feature at_least_one;
    at_least_one.weight = hard_weight_sentinel();
    for (int var : bits) at_least_one.literals.push_back(Literal{var, 1, true});
    out.model.features.push_back(std::move(at_least_one));
    for (std::size_t a = 0; a < bits.size(); ++a)
      for (std::size_t b = a + 1; b < bits.size(); ++b) {
        Feature at_most_one;
        at_most_one.weight = hard_weight_sentinel();
        at_most_one.literals.push_back(Literal{bits[a], 0, true});
        at_most_one.literals.push_back(Literal{bits[b], 0, true});
        out.model.features.push_back(std::move(at_most_one));
      }
  }
  return out;
}

// Marginals of the original variables recovered from indicator-bit marginals.
inline std::vector<std::vector<double>> fold_binarized_marginals(
    const BinarizedModel& bin, const GraphicalModel& orig,
    const std::vector<std::vector<double>>& bin_marginals) {
  std::vector<std::vector<double>> out(orig.variables.size());
  for (std::size_t i = 0; i < orig.variables.size(); ++i) {
    const int card = orig.variables[i].cardinality;
    out[i].assign(static_cast<std::size_t>(card), 0.0);
    if (bin.passthrough[i] >= 0) {
      out[i] = bin_marginals[static_cast<std::size_t>(bin.passthrough[i])];
      continue;
    }
    double total = 0.0;
    for (int v = 0; v < card; ++v) {
      out[i][static_cast<std::size_t>(v)] =
          bin_marginals[static_cast<std::size_t>(bin.value_var[i][static_cast<std::size_t>(v)])][1];
      total += out[i][static_cast<std::size_t>(v)];
    }
    if (total <= 0.0) {
      for (double& p : out[i]) p = 1.0 / card;
    } else {
      for (double& p : out[i]) p /= total;
    }
  }
  return out;
}

}  // namespace pgmsym

#endif
