#ifndef PGMSYM_TESTS_SUPPORT_HPP
#define PGMSYM_TESTS_SUPPORT_HPP

// Test-only oracles and generators. The brute-force searches here stay
// independent of the library's refinement engine so they can vouch for it.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "pgmsym/autograph.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/permgroup.hpp"

namespace pgmsym::test {

// Every color- and adjacency-preserving node permutation, by plain
// backtracking over candidate images. Exponential; keep graphs small.
inline std::vector<Permutation> brute_force_automorphisms(const ColoredGraph& g) {
  std::vector<Permutation> found;
  std::vector<int> image(static_cast<std::size_t>(g.n), -1);
  std::vector<char> used(static_cast<std::size_t>(g.n), 0);

  auto consistent = [&g, &image](int v, int w) {
    if (g.color[static_cast<std::size_t>(v)] != g.color[static_cast<std::size_t>(w)]) return false;
    if (g.adj[static_cast<std::size_t>(v)].size() != g.adj[static_cast<std::size_t>(w)].size()) return false;
    for (int u : g.adj[static_cast<std::size_t>(v)]) {
      if (image[static_cast<std::size_t>(u)] == -1) continue;
      if (!g.has_edge(w, image[static_cast<std::size_t>(u)])) return false;
    }
    // non-neighbors already placed must stay non-neighbors
    for (int u = 0; u < g.n; ++u) {
      if (image[static_cast<std::size_t>(u)] == -1 || u == v) continue;
      if (!g.has_edge(v, u) && g.has_edge(w, image[static_cast<std::size_t>(u)])) return false;
    }
    return true;
  };

  std::vector<int> order(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) order[static_cast<std::size_t>(i)] = i;

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == order.size()) {
      found.emplace_back(image);
      return;
    }
    const int v = order[depth];
    for (int w = 0; w < g.n; ++w) {
      if (used[static_cast<std::size_t>(w)]) continue;
      if (!consistent(v, w)) continue;
      image[static_cast<std::size_t>(v)] = w;
      used[static_cast<std::size_t>(w)] = 1;
      self(self, depth + 1);
      image[static_cast<std::size_t>(v)] = -1;
      used[static_cast<std::size_t>(w)] = 0;
    }
  };
  recurse(recurse, 0);
  return found;
}

inline ColoredGraph random_colored_graph(std::mt19937_64& rng, int max_nodes, int max_colors,
                                         double edge_prob) {
  std::uniform_int_distribution<int> n_pick(1, max_nodes);
  const int n = n_pick(rng);
  std::uniform_int_distribution<int> c_pick(0, std::max(0, max_colors - 1));
  ColoredGraph g;
  for (int i = 0; i < n; ++i) g.add_node(c_pick(rng), NodeKind::literal, i);
  // densify colors
  {
    std::vector<int> seen;
    for (int& c : g.color) {
      auto it = std::find(seen.begin(), seen.end(), c);
      if (it == seen.end()) {
        seen.push_back(c);
        c = static_cast<int>(seen.size()) - 1;
      } else {
        c = static_cast<int>(it - seen.begin());
      }
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unit(rng) < edge_prob) g.add_edge(u, v);
  return g;
}

// Small random models for round-trip and oracle properties.
inline GraphicalModel random_model(std::mt19937_64& rng, int max_vars = 4, int max_card = 3,
                                   int max_features = 5, bool allow_hard = false) {
  std::uniform_int_distribution<int> nv(1, max_vars);
  std::uniform_int_distribution<int> card(2, max_card);
  std::uniform_int_distribution<int> nf(0, max_features);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GraphicalModel g;
  g.kind = unit(rng) < 0.5 ? FeatureKind::clausal : FeatureKind::conjunctive;
  const int n = nv(rng);
  for (int i = 0; i < n; ++i) g.variables.push_back(Variable{i, "v" + std::to_string(i), card(rng)});
  const int m = nf(rng);
  for (int j = 0; j < m; ++j) {
    Feature f;
    f.weight = allow_hard && unit(rng) < 0.15 ? hard_weight_sentinel() : w(rng);
    std::uniform_int_distribution<int> nl(1, 3);
    const int lits = nl(rng);
    for (int k = 0; k < lits; ++k) {
      std::uniform_int_distribution<int> var(0, n - 1);
      const int i = var(rng);
      std::uniform_int_distribution<int> val(0, g.cardinality(i) - 1);
      f.literals.push_back(Literal{i, val(rng), unit(rng) < 0.75});
    }
    g.features.push_back(std::move(f));
  }
  return g;
}

inline State make_state(std::initializer_list<int> values) {
  State s;
  s.values.assign(values.begin(), values.end());
  return s;
}

}  // namespace pgmsym::test

#endif
