#ifndef PGMSYM_REDUCTION_HPP
#define PGMSYM_REDUCTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "pgmsym/autograph.hpp"
#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/symmetry.hpp"

namespace pgmsym {

// Per-variable partition of the domain into swap-equivalent values. Two values
// share a class exactly when exchanging them, holding everything else fixed,
// maps the model onto itself.
struct ValueClasses {
  std::vector<std::vector<int>> class_of;            // [var][value] -> class id
  std::vector<std::vector<std::vector<int>>> members;  // [var][class] -> sorted values

  int num_classes(int var) const { return static_cast<int>(members[static_cast<std::size_t>(var)].size()); }
  int rep(int var, int value) const {
    return members[static_cast<std::size_t>(var)]
                  [static_cast<std::size_t>(class_of[static_cast<std::size_t>(var)][static_cast<std::size_t>(value)])]
                      .front();
  }
  int class_size(int var, int value) const {
    return static_cast<int>(
        members[static_cast<std::size_t>(var)]
               [static_cast<std::size_t>(class_of[static_cast<std::size_t>(var)][static_cast<std::size_t>(value)])]
                   .size());
  }
  const std::vector<int>& class_members(int var, int value) const {
    return members[static_cast<std::size_t>(var)]
                  [static_cast<std::size_t>(class_of[static_cast<std::size_t>(var)][static_cast<std::size_t>(value)])];
  }

  static ValueClasses all_singletons(const GraphicalModel& g) {
    ValueClasses out;
    out.class_of.resize(g.variables.size());
    out.members.resize(g.variables.size());
    for (std::size_t i = 0; i < g.variables.size(); ++i) {
      const int card = g.variables[i].cardinality;
      out.class_of[i].resize(static_cast<std::size_t>(card));
      for (int v = 0; v < card; ++v) {
        out.class_of[i][static_cast<std::size_t>(v)] = v;
        out.members[i].push_back({v});
      }
    }
    return out;
  }

  static ValueClasses from_pairs(const GraphicalModel& g,
                                 const std::vector<std::vector<std::pair<int, int>>>& pairs) {
    ValueClasses out;
    out.class_of.resize(g.variables.size());
    out.members.resize(g.variables.size());
    for (std::size_t i = 0; i < g.variables.size(); ++i) {
      const int card = g.variables[i].cardinality;
      std::vector<int> parent(static_cast<std::size_t>(card));
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&parent](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
          parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
          x = parent[static_cast<std::size_t>(x)];
        }
        return x;
      };
      for (const auto& [a, b] : pairs[i]) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
      std::vector<std::vector<int>> groups(static_cast<std::size_t>(card));
      for (int v = 0; v < card; ++v) groups[static_cast<std::size_t>(find(v))].push_back(v);
      out.class_of[i].resize(static_cast<std::size_t>(card));
      for (int v = 0; v < card; ++v) {
        if (groups[static_cast<std::size_t>(v)].empty()) continue;
        const int id = static_cast<int>(out.members[i].size());
        for (int m : groups[static_cast<std::size_t>(v)]) out.class_of[i][static_cast<std::size_t>(m)] = id;
        out.members[i].push_back(groups[static_cast<std::size_t>(v)]);
      }
    }
    return out;
  }
};

// The swap of v and v2 on one variable, fixing every other vv pair.
inline VVPermutation value_swap_permutation(const VVLayout& layout, int var, int v, int v2) {
  std::vector<int> image(static_cast<std::size_t>(layout.total));
  std::iota(image.begin(), image.end(), 0);
  std::swap(image[static_cast<std::size_t>(layout.index(var, v))],
            image[static_cast<std::size_t>(layout.index(var, v2))]);
  return VVPermutation::checked(layout, Permutation(std::move(image)));
}

// First pass of the two-pass pipeline: every feature gets its own color, which
// pins features in place and leaves only same-variable value exchanges. The
// graph proposes candidate pairs; each is confirmed by applying the literal
// swap to the model before it enters a class.
inline ValueClasses value_swap_classes(const GraphicalModel& g, AutoSearchConfig cfg = {}) {
  const VVLayout layout = VVLayout::of(g);
  const ColoredGraph graph = build_vv_graph(g, FeatureColoring::unique);
  const GeneratorSet node_gens = automorphism_generators(graph, cfg);

  GeneratorSet vv_action{layout.total, {}};
  for (const Permutation& p : node_gens.generators) {
    const VVPermutation phi = lift_to_vv(p, graph, g);  // validates the restriction
    vv_action.generators.push_back(phi.perm());
  }

  std::vector<std::vector<std::pair<int, int>>> confirmed(g.variables.size());
  for (const std::vector<int>& orbit : orbit_partition(vv_action)) {
    for (std::size_t a = 0; a < orbit.size(); ++a)
      for (std::size_t b = a + 1; b < orbit.size(); ++b) {
        const int ia = orbit[a], ib = orbit[b];
        if (layout.var(ia) != layout.var(ib)) continue;
        const int var = layout.var(ia);
        if (is_vv_symmetry(g, value_swap_permutation(layout, var, layout.value(ia), layout.value(ib))))
          confirmed[static_cast<std::size_t>(var)].push_back({layout.value(ia), layout.value(ib)});
      }
  }
  return ValueClasses::from_pairs(g, confirmed);
}

// Model over one representative value per class. Reduced domains are densely
// renumbered; value_maps translate between the two spaces.
struct ReducedModel {
  GraphicalModel model;
  ValueClasses classes;                     // over the original model
  std::vector<std::vector<int>> red_to_orig;  // [var][reduced value] -> original representative
  std::vector<std::vector<int>> orig_to_red;  // [var][original value] -> reduced value
  double dropped_log_weight = 0.0;          // weight of clauses that became constant-true
  int dropped_hard = 0;                     // count of hard clauses that became constant-true
};

inline ReducedModel reduce_model(const GraphicalModel& g, const ValueClasses& classes) {
  ReducedModel out;
  out.classes = classes;
  out.model.kind = g.kind;
  out.red_to_orig.resize(g.variables.size());
  out.orig_to_red.resize(g.variables.size());
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    Variable v = g.variables[i];
    v.cardinality = classes.num_classes(static_cast<int>(i));
    out.model.variables.push_back(v);
    out.red_to_orig[i].resize(static_cast<std::size_t>(v.cardinality));
    for (int c = 0; c < v.cardinality; ++c) out.red_to_orig[i][static_cast<std::size_t>(c)] = classes.members[i][static_cast<std::size_t>(c)].front();
    out.orig_to_red[i] = classes.class_of[i];
  }

  const bool clausal = g.kind == FeatureKind::clausal;
  for (const Feature& f : g.features) {
    Feature nf;
    nf.weight = f.weight;
    bool drop_feature = false;
    bool constant_true = false;
    for (const Literal& l : f.literals) {
      const bool representative = classes.rep(l.var, l.value) == l.value;
      if (representative) {
        nf.literals.push_back(Literal{l.var, classes.class_of[static_cast<std::size_t>(l.var)][static_cast<std::size_t>(l.value)], l.positive});
        continue;
      }
      // Non-representative values never occur in the reduced space, so the
      // assignment test is constantly false.
      if (l.positive) {
        if (clausal) continue;  // false disjunct drops out
        drop_feature = true;    // false conjunct kills the feature
        break;
      }
      if (clausal) {
        constant_true = true;  // true disjunct satisfies the whole clause
        break;
      }
      // true conjunct drops out
    }
    if (drop_feature) {
      if (is_hard(f.weight))
        throw ReductionError("hard conjunctive feature became unsatisfiable under reduction");
      continue;
    }
    if (constant_true || (!clausal && nf.literals.empty())) {
      if (is_hard(f.weight))
        ++out.dropped_hard;  // satisfied everywhere, constant factor
      else
        out.dropped_log_weight += f.weight;
      continue;
    }
    if (clausal && nf.literals.empty()) {
      // every disjunct false: the feature can never fire
      if (is_hard(f.weight))
        throw ReductionError("hard clause became unsatisfiable under reduction");
      continue;
    }
    out.model.features.push_back(std::move(nf));
  }
  out.model = canonical(std::move(out.model));
  return out;
}

inline State rep_state(const State& s, const ValueClasses& classes) {
  State out = s;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = classes.rep(static_cast<int>(i), out.values[i]);
  return out;
}

// c(s): number of states sharing s's representative.
inline std::uint64_t suborbit_size(const State& s, const ValueClasses& classes) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    c *= static_cast<std::uint64_t>(classes.class_size(static_cast<int>(i), s.values[i]));
  return c;
}

// c^i(s): members of the suborbit differing from s at most on variable i.
inline std::uint64_t per_variable_suborbit(const State& s, int var, const ValueClasses& classes) {
  return static_cast<std::uint64_t>(classes.class_size(var, s.values[static_cast<std::size_t>(var)]));
}

inline State to_reduced_state(const ReducedModel& r, const State& orig) {
  State out = orig;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = r.orig_to_red[i][static_cast<std::size_t>(out.values[i])];
  return out;
}

inline State from_reduced_state(const ReducedModel& r, const State& red) {
  State out = red;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = r.red_to_orig[i][static_cast<std::size_t>(out.values[i])];
  return out;
}

// P_reduced(u) / P_original(u) over representative states. The ratio must be a
// state-independent constant at least 1; anything else means the classes or
// the reduction are wrong.
inline double k_ratio(const GraphicalModel& g, const ReducedModel& r,
                      std::uint64_t cap = kDefaultStateCap) {
  const ExactDistribution pg = exact_distribution(g, HardPolicy::exact_infinity(), cap);
  const ExactDistribution pr = exact_distribution(r.model, HardPolicy::exact_infinity(), cap);
  double ratio = 0.0;
  bool have = false;
  for (std::uint64_t idx = 0; idx < pr.indexer.size(); ++idx) {
    const State red = pr.indexer.decode(idx);
    const State orig = from_reduced_state(r, red);
    const double po = pg.p[pg.indexer.encode(orig)];
    if (po <= 0.0) {
      if (pr.p[idx] > 0.0)
        throw RatioNotConstant("reduced model puts mass on an impossible representative state");
      continue;
    }
    const double this_ratio = pr.p[idx] / po;
    if (!have) {
      ratio = this_ratio;
      have = true;
    } else if (std::abs(this_ratio - ratio) > 1e-9 * std::max(1.0, std::abs(ratio))) {
      throw RatioNotConstant("probability ratio varies across representative states");
    }
  }
  if (!have) throw RatioNotConstant("no representative state has positive probability");
  return ratio;
}

// Second pass: VV symmetries of the reduced model, features recolored by
// weight class.
inline std::vector<VVPermutation> reduced_vv_symmetries(const ReducedModel& r,
                                                        AutoSearchConfig cfg = {}) {
  return vv_symmetry_generators(r.model, cfg);
}

// Composite move: send s to its representative, apply a reduced-model VV
// symmetry, then swap each variable's value to the chosen class member.
// choices[i] must lie in the class of the mapped representative's value.
inline State apply_nec(const ReducedModel& r, const VVPermutation& reduced_phi, const State& s,
                       const std::vector<int>& choices) {
  const VVLayout red_layout = VVLayout::of(r.model);
  const State u = to_reduced_state(r, rep_state(s, r.classes));
  const State mapped = from_reduced_state(r, apply_vv_to_state(red_layout, reduced_phi, u));
  State out = mapped;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto& cls = r.classes.class_members(static_cast<int>(i), mapped.values[i]);
    if (std::find(cls.begin(), cls.end(), choices[i]) == cls.end())
      throw InvalidPermutation("swap choice outside the value class");
    out.values[i] = choices[i];
  }
  return out;
}

// Same move with the class members drawn uniformly, one per variable.
template <class Rng>
State apply_nec_uniform(const ReducedModel& r, const VVPermutation& reduced_phi, const State& s,
                        Rng& rng) {
  const VVLayout red_layout = VVLayout::of(r.model);
  const State u = to_reduced_state(r, rep_state(s, r.classes));
  State out = from_reduced_state(r, apply_vv_to_state(red_layout, reduced_phi, u));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const auto& cls = r.classes.class_members(static_cast<int>(i), out.values[i]);
    if (cls.size() == 1) continue;
    std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
    out.values[i] = cls[pick(rng)];
  }
  return out;
}

// Closure of a state under value swaps and reduced-model symmetries, sorted.
inline std::vector<State> nec_orbit_of_state(const ReducedModel& r,
                                             const std::vector<VVPermutation>& reduced_gens,
                                             const State& s, std::uint64_t cap = kDefaultOrbitCap) {
  const VVLayout red_layout = VVLayout::of(r.model);
  std::set<State> seen;
  std::vector<State> queue{s};
  seen.insert(s);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const State cur = queue[head];
    auto push = [&](State next) {
      if (seen.insert(next).second) {
        if (seen.size() > cap) throw OrbitCapExceeded("state orbit exceeds cap");
        queue.push_back(std::move(next));
      }
    };
    for (std::size_t i = 0; i < cur.values.size(); ++i)
      for (int v : r.classes.class_members(static_cast<int>(i), cur.values[i])) {
        if (v == cur.values[i]) continue;
        State next = cur;
        next.values[i] = v;
        push(std::move(next));
      }
    for (const VVPermutation& phi : reduced_gens) {
      const State u = to_reduced_state(r, rep_state(cur, r.classes));
      push(from_reduced_state(r, apply_vv_to_state(red_layout, phi, u)));
    }
  }
  return std::vector<State>(seen.begin(), seen.end());
}

}  // namespace pgmsym

#endif
