#ifndef PGMSYM_AUTOGRAPH_HPP
#define PGMSYM_AUTOGRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/permgroup.hpp"
#include "pgmsym/symmetry.hpp"

namespace pgmsym {

enum class NodeKind { literal, vv_pair, feature, mutex_feature };

// Vertex-colored undirected graph. Node order is fixed by the builders:
// value/vv nodes first, then per-variable mutex nodes, then feature nodes.
struct ColoredGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;  // sorted, no self-loops
  std::vector<int> color;             // dense 0..C-1
  std::vector<NodeKind> kind;
  std::vector<int> payload;  // vv index, variable id, or feature index

  int add_node(int c, NodeKind k, int pl) {
    adj.emplace_back();
    color.push_back(c);
    kind.push_back(k);
    payload.push_back(pl);
    return n++;
  }

  void add_edge(int u, int v) {
    if (u == v) throw ValidationError("self-loop");
    auto insert = [](std::vector<int>& list, int x) {
      auto it = std::lower_bound(list.begin(), list.end(), x);
      if (it == list.end() || *it != x) list.insert(it, x);
    };
    insert(adj[static_cast<std::size_t>(u)], v);
    insert(adj[static_cast<std::size_t>(v)], u);
  }

  bool has_edge(int u, int v) const {
    const auto& list = adj[static_cast<std::size_t>(u)];
    return std::binary_search(list.begin(), list.end(), v);
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& list : adj) twice += list.size();
    return twice / 2;
  }
};

struct StableColoring {
  std::vector<int> colors;
  int rounds = 0;
  int num_colors = 0;
};

namespace detail {

inline int count_colors(const std::vector<int>& colors) {
  int mx = -1;
  for (int c : colors) mx = std::max(mx, c);
  return mx + 1;
}

using Sig = std::vector<int>;  // [own color, sorted neighbor colors...]

inline std::vector<Sig> signatures(const ColoredGraph& g, const std::vector<int>& colors) {
  std::vector<Sig> sigs(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v) {
    Sig s;
    s.reserve(g.adj[static_cast<std::size_t>(v)].size() + 1);
    s.push_back(colors[static_cast<std::size_t>(v)]);
    for (int u : g.adj[static_cast<std::size_t>(v)]) s.push_back(colors[static_cast<std::size_t>(u)]);
    std::sort(s.begin() + 1, s.end());
    sigs[static_cast<std::size_t>(v)] = std::move(s);
  }
  return sigs;
}

// New color ids are ranks in the sorted list of distinct signatures, so the
// refined coloring is a canonical function of the input partition.
inline std::vector<int> rank_signatures(const std::vector<Sig>& sigs) {
  std::vector<Sig> sorted = sigs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(sigs.size());
  for (std::size_t v = 0; v < sigs.size(); ++v)
    out[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sigs[v]) - sorted.begin());
  return out;
}

}  // namespace detail

inline std::vector<int> refine_colors(const ColoredGraph& g, std::vector<int> colors, int* rounds = nullptr) {
  int r = 0;
  int current = detail::count_colors(colors);
  for (;;) {
    std::vector<int> next = detail::rank_signatures(detail::signatures(g, colors));
    const int next_count = detail::count_colors(next);
    ++r;
    if (next_count == current) {
      if (rounds) *rounds = r;
      return next;  // stable: same partition, canonical ids
    }
    colors = std::move(next);
    current = next_count;
  }
}

inline StableColoring color_refinement(const ColoredGraph& g) {
  StableColoring out;
  out.colors = refine_colors(g, g.color, &out.rounds);
  out.num_colors = detail::count_colors(out.colors);
  return out;
}

// Lockstep refinement of two colorings of the same graph. Returns nothing when
// the signature multisets diverge, which proves no color-preserving
// isomorphism can relate the two sides.
inline std::optional<std::pair<std::vector<int>, std::vector<int>>> refine_colors_pair(
    const ColoredGraph& g, std::vector<int> ca, std::vector<int> cb) {
  int count = -1;
  for (;;) {
    const std::vector<detail::Sig> sa = detail::signatures(g, ca);
    const std::vector<detail::Sig> sb = detail::signatures(g, cb);
    std::vector<detail::Sig> sorted_a = sa, sorted_b = sb;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a != sorted_b) return std::nullopt;
    sorted_a.erase(std::unique(sorted_a.begin(), sorted_a.end()), sorted_a.end());
    auto rank = [&sorted_a](const detail::Sig& s) {
      return static_cast<int>(std::lower_bound(sorted_a.begin(), sorted_a.end(), s) - sorted_a.begin());
    };
    std::vector<int> na(ca.size()), nb(cb.size());
    for (std::size_t v = 0; v < ca.size(); ++v) {
      na[v] = rank(sa[v]);
      nb[v] = rank(sb[v]);
    }
    const int next_count = static_cast<int>(sorted_a.size());
    if (next_count == count) return std::make_pair(std::move(na), std::move(nb));
    ca = std::move(na);
    cb = std::move(nb);
    count = next_count;
  }
}

struct AutoSearchConfig {
  std::size_t node_budget = 1000000;
};

namespace detail {

class AutomorphismSearch {
public:
  AutomorphismSearch(const ColoredGraph& g, std::size_t budget) : g_(g), budget_(budget) {}

  std::vector<Permutation> run() {
    search(refine_colors(g_, g_.color));
    return std::move(gens_);
  }

private:
  void spend() {
    if (budget_ == 0) throw SearchBudgetExceeded("automorphism search budget exhausted");
    --budget_;
  }

  // cells of size > 1, as (size, min node, color)
  std::optional<std::pair<int, std::vector<int>>> target_cell(const std::vector<int>& colors) const {
    const int nc = count_colors(colors);
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
    for (int v = 0; v < g_.n; ++v) cells[static_cast<std::size_t>(colors[static_cast<std::size_t>(v)])].push_back(v);
    int best = -1;
    for (int c = 0; c < nc; ++c) {
      const auto& cell = cells[static_cast<std::size_t>(c)];
      if (cell.size() < 2) continue;
      if (best == -1) {
        best = c;
        continue;
      }
      const auto& bc = cells[static_cast<std::size_t>(best)];
      if (cell.size() < bc.size() || (cell.size() == bc.size() && cell.front() < bc.front())) best = c;
    }
    if (best == -1) return std::nullopt;
    return std::make_pair(best, cells[static_cast<std::size_t>(best)]);
  }

  static std::vector<int> individualize(std::vector<int> colors, int v) {
    colors[static_cast<std::size_t>(v)] = count_colors(colors);
    return colors;
  }

  // colors must be stable and canonical
  void search(const std::vector<int>& colors) {
    spend();
    const auto cell = target_cell(colors);
    if (!cell) return;
    const std::vector<int>& members = cell->second;
    const int v = members.front();

    search(refine_colors(g_, individualize(colors, v)));

    GeneratorSet so_far{g_.n, gens_};
    for (std::size_t k = 1; k < members.size(); ++k) {
      const int u = members[k];
      so_far.generators = gens_;
      const std::vector<int> orb = orbit_of_point(so_far, v, static_cast<std::uint64_t>(g_.n));
      if (std::binary_search(orb.begin(), orb.end(), u)) continue;
      auto seed = refine_colors_pair(g_, individualize(colors, v), individualize(colors, u));
      if (!seed) continue;
      if (auto found = match(seed->first, seed->second)) gens_.push_back(std::move(*found));
    }
  }

  // One color-preserving automorphism relating the two refined colorings, or
  // nothing. Both inputs come from refine_colors_pair.
  std::optional<Permutation> match(const std::vector<int>& ca, const std::vector<int>& cb) {
    spend();
    const int nc = count_colors(ca);
    if (nc == g_.n) return extract(ca, cb);
    std::vector<std::vector<int>> cells_a(static_cast<std::size_t>(nc)), cells_b(static_cast<std::size_t>(nc));
    for (int v = 0; v < g_.n; ++v) {
      cells_a[static_cast<std::size_t>(ca[static_cast<std::size_t>(v)])].push_back(v);
      cells_b[static_cast<std::size_t>(cb[static_cast<std::size_t>(v)])].push_back(v);
    }
    int best = -1;
    for (int c = 0; c < nc; ++c) {
      if (cells_a[static_cast<std::size_t>(c)].size() < 2) continue;
      if (best == -1 || cells_a[static_cast<std::size_t>(c)].size() < cells_a[static_cast<std::size_t>(best)].size() ||
          (cells_a[static_cast<std::size_t>(c)].size() == cells_a[static_cast<std::size_t>(best)].size() &&
           cells_a[static_cast<std::size_t>(c)].front() < cells_a[static_cast<std::size_t>(best)].front()))
        best = c;
    }
    const int v = cells_a[static_cast<std::size_t>(best)].front();
    for (int u : cells_b[static_cast<std::size_t>(best)]) {
      auto next = refine_colors_pair(g_, individualize(ca, v), individualize(cb, u));
      if (!next) continue;
      if (auto found = match(next->first, next->second)) return found;
    }
    return std::nullopt;
  }

  std::optional<Permutation> extract(const std::vector<int>& ca, const std::vector<int>& cb) const {
    std::vector<int> by_color(static_cast<std::size_t>(g_.n), -1);
    for (int v = 0; v < g_.n; ++v) by_color[static_cast<std::size_t>(cb[static_cast<std::size_t>(v)])] = v;
    std::vector<int> image(static_cast<std::size_t>(g_.n));
    for (int v = 0; v < g_.n; ++v) image[static_cast<std::size_t>(v)] = by_color[static_cast<std::size_t>(ca[static_cast<std::size_t>(v)])];
    Permutation p{image};
    // refinement alignment does not by itself guarantee an automorphism
    for (int v = 0; v < g_.n; ++v) {
      if (g_.color[static_cast<std::size_t>(p(v))] != g_.color[static_cast<std::size_t>(v)]) return std::nullopt;
      for (int w : g_.adj[static_cast<std::size_t>(v)])
        if (!g_.has_edge(p(v), p(w))) return std::nullopt;
    }
    return p;
  }

  const ColoredGraph& g_;
  std::size_t budget_;
  std::vector<Permutation> gens_;
};

inline std::vector<std::int64_t> weight_class_keys(const GraphicalModel& g) {
  std::vector<std::int64_t> keys;
  keys.reserve(g.features.size());
  for (const Feature& f : g.features) keys.push_back(weight_key(f.weight));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

inline int weight_class_rank(const std::vector<std::int64_t>& keys, double w) {
  return static_cast<int>(std::lower_bound(keys.begin(), keys.end(), weight_key(w)) - keys.begin());
}

}  // namespace detail

// Generating set of the color-preserving automorphism group; every returned
// permutation maps edges to edges and preserves the initial colors.
inline GeneratorSet automorphism_generators(const ColoredGraph& g, AutoSearchConfig cfg = {}) {
  detail::AutomorphismSearch search(g, cfg.node_budget);
  return GeneratorSet{g.n, search.run()};
}

// Boolean-only graph: two literal nodes per variable joined by an edge, one
// node per feature joined to the literals it mentions. Value-0 literals share
// one color, value-1 literals another, features are colored by weight class.
inline ColoredGraph build_variable_graph(const GraphicalModel& g) {
  for (const Variable& v : g.variables)
    if (v.cardinality != 2)
      throw NonBooleanVariable("variable '" + v.name + "' is not Boolean");
  const std::vector<std::int64_t> keys = detail::weight_class_keys(g);
  const std::vector<int> cards(g.variables.size(), 2);
  ColoredGraph out;
  for (int i = 0; i < g.var_count(); ++i) {
    out.add_node(0, NodeKind::literal, 2 * i);
    out.add_node(1, NodeKind::literal, 2 * i + 1);
    out.add_edge(2 * i, 2 * i + 1);
  }
  for (int j = 0; j < g.feature_count(); ++j) {
    const Feature& f = g.features[static_cast<std::size_t>(j)];
    const int fn = out.add_node(2 + detail::weight_class_rank(keys, f.weight), NodeKind::feature, j);
    for (const auto& [var, values] : feature_value_sets(g.kind, f, cards))
      for (int v : values) out.add_edge(fn, 2 * var + v);
  }
  return out;
}

enum class FeatureColoring { by_weight, unique };

// One node per variable-value pair, all sharing a single color so values may
// trade places; a mutex node per variable carrying a reserved color enforces
// that values of one variable travel together; feature nodes attach to the
// admitted values of each variable they constrain, so a negative literal
// X!=v reaches every value of X except v.
inline ColoredGraph build_vv_graph(const GraphicalModel& g,
                                   FeatureColoring mode = FeatureColoring::by_weight) {
  const VVLayout layout = VVLayout::of(g);
  const std::vector<std::int64_t> keys = detail::weight_class_keys(g);
  ColoredGraph out;
  for (int idx = 0; idx < layout.total; ++idx) out.add_node(0, NodeKind::vv_pair, idx);
  for (int i = 0; i < g.var_count(); ++i) {
    const int mutex = out.add_node(1, NodeKind::mutex_feature, i);
    for (int v = 0; v < g.cardinality(i); ++v) out.add_edge(mutex, layout.index(i, v));
  }
  std::vector<int> cards;
  for (const Variable& v : g.variables) cards.push_back(v.cardinality);
  for (int j = 0; j < g.feature_count(); ++j) {
    const Feature& f = g.features[static_cast<std::size_t>(j)];
    const int c = mode == FeatureColoring::by_weight ? 2 + detail::weight_class_rank(keys, f.weight) : 2 + j;
    const int fn = out.add_node(c, NodeKind::feature, j);
    for (const auto& [var, values] : feature_value_sets(g.kind, f, cards))
      for (int v : values) out.add_edge(fn, layout.index(var, v));
  }
  return out;
}

// Restriction of a variable-graph automorphism to whole variables.
inline Permutation lift_to_variable_perm(const Permutation& node_perm, const ColoredGraph& graph,
                                         const GraphicalModel& g) {
  const int n = g.var_count();
  std::vector<int> image(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int zero_img = node_perm(2 * i);
    const int one_img = node_perm(2 * i + 1);
    if (zero_img >= 2 * n || one_img >= 2 * n || zero_img % 2 != 0 || one_img % 2 != 1 ||
        zero_img / 2 != one_img / 2 || graph.kind[static_cast<std::size_t>(zero_img)] != NodeKind::literal)
      throw InvalidLift("literal nodes do not map variable-to-variable");
    image[static_cast<std::size_t>(i)] = zero_img / 2;
  }
  return Permutation(std::move(image));
}

// Restriction of a vv-graph automorphism to the vv node block. The mutex
// structure forces every automorphism to map the block onto itself and to keep
// each variable's values on a single variable; a violation means an engine
// bug, not bad input.
inline VVPermutation lift_to_vv(const Permutation& node_perm, const ColoredGraph& graph,
                                const GraphicalModel& g) {
  const VVLayout layout = VVLayout::of(g);
  std::vector<int> image(static_cast<std::size_t>(layout.total));
  for (int idx = 0; idx < layout.total; ++idx) {
    const int to = node_perm(idx);
    if (to >= layout.total || graph.kind[static_cast<std::size_t>(to)] != NodeKind::vv_pair)
      throw InvalidLift("vv node mapped outside the vv block");
    image[static_cast<std::size_t>(idx)] = to;
  }
  auto vv = VVPermutation::try_create(layout, Permutation(std::move(image)));
  if (!vv) throw InvalidLift("vv restriction is not variable-consistent");
  return *vv;
}

// Variable symmetries via the Boolean literal graph.
inline GeneratorSet variable_symmetry_generators(const GraphicalModel& g, AutoSearchConfig cfg = {}) {
  const ColoredGraph graph = build_variable_graph(g);
  const GeneratorSet node_gens = automorphism_generators(graph, cfg);
  GeneratorSet out{g.var_count(), {}};
  for (const Permutation& p : node_gens.generators) {
    Permutation theta = lift_to_variable_perm(p, graph, g);
    if (!theta.is_identity()) out.generators.push_back(std::move(theta));
  }
  return out;
}

// VV symmetries via the vv-pair graph.
inline std::vector<VVPermutation> vv_symmetry_generators(const GraphicalModel& g,
                                                         AutoSearchConfig cfg = {}) {
  const ColoredGraph graph = build_vv_graph(g, FeatureColoring::by_weight);
  const GeneratorSet node_gens = automorphism_generators(graph, cfg);
  std::vector<VVPermutation> out;
  for (const Permutation& p : node_gens.generators) {
    VVPermutation phi = lift_to_vv(p, graph, g);
    if (!phi.is_identity()) out.push_back(std::move(phi));
  }
  return out;
}

// DIMACS-like debug dump: "p edge n m", then "n <node> <color>" and "e <u> <v>"
// with 1-based node ids.
inline void dump_graph(const ColoredGraph& g, std::ostream& out) {
  out << "p edge " << g.n << " " << g.edge_count() << "\n";
  for (int v = 0; v < g.n; ++v) out << "n " << v + 1 << " " << g.color[static_cast<std::size_t>(v)] << "\n";
  for (int v = 0; v < g.n; ++v)
    for (int u : g.adj[static_cast<std::size_t>(v)])
      if (v < u) out << "e " << v + 1 << " " << u + 1 << "\n";
}

}  // namespace pgmsym

#endif
