#ifndef PGMSYM_SYMMETRY_HPP
#define PGMSYM_SYMMETRY_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/permgroup.hpp"

namespace pgmsym {

inline constexpr std::uint64_t kDefaultRenamingCap = 100000;

// Dense indexing of variable-value pairs: (var, value) <-> offset[var] + value.
// The encoding is a prefix sum over cardinalities so ground sets are
// reproducible across runs.
struct VVLayout {
  std::vector<int> offset;
  std::vector<int> card;
  std::vector<int> var_of;
  std::vector<int> value_of;
  int total = 0;

  static VVLayout of(const GraphicalModel& g) {
    VVLayout l;
    l.offset.resize(g.variables.size());
    l.card.resize(g.variables.size());
    for (std::size_t i = 0; i < g.variables.size(); ++i) {
      l.offset[i] = l.total;
      l.card[i] = g.variables[i].cardinality;
      l.total += g.variables[i].cardinality;
    }
    l.var_of.resize(static_cast<std::size_t>(l.total));
    l.value_of.resize(static_cast<std::size_t>(l.total));
    for (std::size_t i = 0; i < g.variables.size(); ++i)
      for (int v = 0; v < l.card[i]; ++v) {
        l.var_of[static_cast<std::size_t>(l.offset[i] + v)] = static_cast<int>(i);
        l.value_of[static_cast<std::size_t>(l.offset[i] + v)] = v;
      }
    return l;
  }

  int nvars() const { return static_cast<int>(offset.size()); }
  int index(int var, int value) const { return offset[static_cast<std::size_t>(var)] + value; }
  int var(int idx) const { return var_of[static_cast<std::size_t>(idx)]; }
  int value(int idx) const { return value_of[static_cast<std::size_t>(idx)]; }

  std::vector<std::string> labels(const GraphicalModel& g) const {
    std::vector<std::string> out(static_cast<std::size_t>(total));
    for (int idx = 0; idx < total; ++idx)
      out[static_cast<std::size_t>(idx)] =
          g.variables[static_cast<std::size_t>(var(idx))].name + "." + std::to_string(value(idx));
    return out;
  }
};

// A VV permutation is valid when every variable's values land on a single
// target variable; then states map to states and the induced variable map is
// itself a bijection between equicardinal variables.
inline bool is_valid_vv(const VVLayout& layout, const Permutation& p) {
  if (p.size() != layout.total) return false;
  for (int i = 0; i < layout.nvars(); ++i) {
    const int target = layout.var(p(layout.index(i, 0)));
    if (layout.card[static_cast<std::size_t>(target)] != layout.card[static_cast<std::size_t>(i)])
      return false;
    for (int v = 1; v < layout.card[static_cast<std::size_t>(i)]; ++v)
      if (layout.var(p(layout.index(i, v))) != target) return false;
  }
  return true;
}

class VVPermutation {
public:
  static VVPermutation checked(const VVLayout& layout, Permutation p) {
    if (!is_valid_vv(layout, p))
      throw InvalidPermutation("VV permutation does not map each variable to a single variable");
    return VVPermutation(layout, std::move(p));
  }

  static std::optional<VVPermutation> try_create(const VVLayout& layout, Permutation p) {
    if (!is_valid_vv(layout, p)) return std::nullopt;
    return VVPermutation(layout, std::move(p));
  }

  static VVPermutation identity(const VVLayout& layout) {
    return checked(layout, Permutation::identity(layout.total));
  }

  const Permutation& perm() const { return perm_; }
  const std::vector<int>& var_image() const { return var_image_; }
  int map_index(int idx) const { return perm_(idx); }
  bool is_identity() const { return perm_.is_identity(); }

  friend bool operator==(const VVPermutation& a, const VVPermutation& b) { return a.perm_ == b.perm_; }
  friend bool operator<(const VVPermutation& a, const VVPermutation& b) { return a.perm_ < b.perm_; }

private:
  VVPermutation(const VVLayout& layout, Permutation p) : perm_(std::move(p)) {
    var_image_.resize(static_cast<std::size_t>(layout.nvars()));
    for (int i = 0; i < layout.nvars(); ++i)
      var_image_[static_cast<std::size_t>(i)] = layout.var(perm_(layout.index(i, 0)));
  }

  Permutation perm_;
  std::vector<int> var_image_;
};

inline VVPermutation compose_vv(const VVLayout& layout, const VVPermutation& a, const VVPermutation& b) {
  return VVPermutation::checked(layout, compose(a.perm(), b.perm()));
}

inline VVPermutation inverse_vv(const VVLayout& layout, const VVPermutation& a) {
  return VVPermutation::checked(layout, inverse(a.perm()));
}

inline State apply_vv_to_state(const VVLayout& layout, const VVPermutation& phi, const State& s) {
  State out;
  out.values.resize(s.values.size());
  for (int i = 0; i < layout.nvars(); ++i) {
    const int image = phi.map_index(layout.index(i, s.values[static_cast<std::size_t>(i)]));
    out.values[static_cast<std::size_t>(layout.var(image))] = layout.value(image);
  }
  return out;
}

// Raw-permutation variant used in sampling loops; p must be a valid VV
// permutation (products of valid ones always are).
inline State apply_vv_perm_to_state(const VVLayout& layout, const Permutation& p, const State& s) {
  State out;
  out.values.resize(s.values.size());
  for (int i = 0; i < layout.nvars(); ++i) {
    const int image = p(layout.index(i, s.values[static_cast<std::size_t>(i)]));
    out.values[static_cast<std::size_t>(layout.var(image))] = layout.value(image);
  }
  return out;
}

// Rewrites every literal through phi; weights ride along unchanged. The result
// is canonicalized so it can be compared against the source model.
inline GraphicalModel apply_vv_to_model(const GraphicalModel& g, const VVPermutation& phi) {
  const VVLayout layout = VVLayout::of(g);
  GraphicalModel out = g;
  for (Feature& f : out.features)
    for (Literal& l : f.literals) {
      const int image = phi.map_index(layout.index(l.var, l.value));
      l.var = layout.var(image);
      l.value = layout.value(image);
    }
  return canonical(std::move(out));
}

inline bool is_vv_symmetry(const GraphicalModel& g, const VVPermutation& phi) {
  return canonical_equal(apply_vv_to_model(g, phi), g);
}

// phi(X, v) = (theta(X), v); theta must only map between equicardinal
// variables.
inline VVPermutation embed_variable_symmetry(const GraphicalModel& g, const Permutation& theta) {
  const VVLayout layout = VVLayout::of(g);
  if (theta.size() != layout.nvars()) throw SizeMismatch("variable permutation size mismatch");
  std::vector<int> image(static_cast<std::size_t>(layout.total));
  for (int i = 0; i < layout.nvars(); ++i) {
    const int j = theta(i);
    if (g.cardinality(i) != g.cardinality(j))
      throw DomainMismatch("variable permutation maps between different domain sizes");
    for (int v = 0; v < g.cardinality(i); ++v)
      image[static_cast<std::size_t>(layout.index(i, v))] = layout.index(j, v);
  }
  return VVPermutation::checked(layout, Permutation(std::move(image)));
}

// Count check: for every state and every cardinality class, the number of
// variables holding each value must survive the permutation. Enumerates the
// state space, so only usable under the oracle cap.
inline bool is_count_symmetry(const GraphicalModel& g, const VVPermutation& phi,
                              std::uint64_t cap = kDefaultStateCap) {
  const VVLayout layout = VVLayout::of(g);
  StateIndexer indexer(g, cap);
  // variables grouped by cardinality
  std::vector<int> class_of(static_cast<std::size_t>(g.var_count()));
  std::vector<int> cards;
  for (int i = 0; i < g.var_count(); ++i) {
    const int c = g.cardinality(i);
    auto it = std::find(cards.begin(), cards.end(), c);
    if (it == cards.end()) {
      class_of[static_cast<std::size_t>(i)] = static_cast<int>(cards.size());
      cards.push_back(c);
    } else {
      class_of[static_cast<std::size_t>(i)] = static_cast<int>(it - cards.begin());
    }
  }
  std::vector<std::vector<int>> count_a(cards.size()), count_b(cards.size());
  for (std::size_t k = 0; k < cards.size(); ++k) {
    count_a[k].assign(static_cast<std::size_t>(cards[k]), 0);
    count_b[k].assign(static_cast<std::size_t>(cards[k]), 0);
  }
  for (std::uint64_t idx = 0; idx < indexer.size(); ++idx) {
    const State s = indexer.decode(idx);
    const State t = apply_vv_to_state(layout, phi, s);
    for (auto& row : count_a) std::fill(row.begin(), row.end(), 0);
    for (auto& row : count_b) std::fill(row.begin(), row.end(), 0);
    for (int i = 0; i < g.var_count(); ++i) {
      const std::size_t k = static_cast<std::size_t>(class_of[static_cast<std::size_t>(i)]);
      ++count_a[k][static_cast<std::size_t>(s.values[static_cast<std::size_t>(i)])];
      ++count_b[k][static_cast<std::size_t>(t.values[static_cast<std::size_t>(i)])];
    }
    if (count_a != count_b) return false;
  }
  return true;
}

// Per-variable value bijections; conjugating a symmetry by a renaming yields
// its expression over the renamed domains.
struct Renaming {
  std::vector<std::vector<int>> value_map;  // [var][value] -> renamed value

  bool is_identity() const {
    for (const auto& m : value_map)
      for (std::size_t v = 0; v < m.size(); ++v)
        if (m[v] != static_cast<int>(v)) return false;
    return true;
  }
};

inline VVPermutation renaming_permutation(const VVLayout& layout, const Renaming& r) {
  std::vector<int> image(static_cast<std::size_t>(layout.total));
  for (int i = 0; i < layout.nvars(); ++i)
    for (int v = 0; v < layout.card[static_cast<std::size_t>(i)]; ++v)
      image[static_cast<std::size_t>(layout.index(i, v))] =
          layout.index(i, r.value_map[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)]);
  return VVPermutation::checked(layout, Permutation(std::move(image)));
}

inline VVPermutation conjugate_by_renaming(const VVLayout& layout, const Renaming& r,
                                           const VVPermutation& phi) {
  const VVPermutation rp = renaming_permutation(layout, r);
  return VVPermutation::checked(layout, compose(rp.perm(), compose(phi.perm(), inverse(rp.perm()))));
}

inline std::string renaming_to_string(const GraphicalModel& g, const Renaming& r) {
  std::string out;
  for (std::size_t i = 0; i < r.value_map.size(); ++i) {
    const auto& m = r.value_map[i];
    bool id = true;
    for (std::size_t v = 0; v < m.size(); ++v)
      if (m[v] != static_cast<int>(v)) id = false;
    if (id) continue;
    if (!out.empty()) out += ", ";
    out += "rename " + g.variables[i].name + ":";
    for (std::size_t v = 0; v < m.size(); ++v) out += " " + std::to_string(v) + "->" + std::to_string(m[v]);
  }
  if (out.empty()) out = "identity";
  return out;
}

enum class TaxonomyLabel { count, srv_count, urv_count, equicardinal_noncount, non_equicardinal };

inline std::string taxonomy_label_name(TaxonomyLabel l) {
  switch (l) {
    case TaxonomyLabel::count: return "count";
    case TaxonomyLabel::srv_count: return "srv_count";
    case TaxonomyLabel::urv_count: return "urv_count";
    case TaxonomyLabel::equicardinal_noncount: return "equicardinal_noncount";
    case TaxonomyLabel::non_equicardinal: return "non_equicardinal";
  }
  return "?";
}

struct GeneratorClassification {
  TaxonomyLabel label = TaxonomyLabel::count;
  std::optional<Renaming> witness;
};

struct TaxonomyReport {
  TaxonomyLabel group_label = TaxonomyLabel::count;
  std::optional<Renaming> witness;  // set for srv_count
  std::vector<GeneratorClassification> per_generator;
};

namespace detail {

// Odometer over per-variable value bijections, lexicographic with variable 0
// most significant.
class RenamingEnumerator {
public:
  RenamingEnumerator(const GraphicalModel& g, std::uint64_t cap) {
    std::uint64_t count = 1;
    for (const Variable& v : g.variables) {
      std::vector<std::vector<int>> perms;
      std::vector<int> p(static_cast<std::size_t>(v.cardinality));
      for (int x = 0; x < v.cardinality; ++x) p[static_cast<std::size_t>(x)] = x;
      do {
        perms.push_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
      count *= perms.size();
      if (count > cap)
        throw RenamingSpaceTooLarge("renaming space exceeds cap of " + std::to_string(cap));
      per_var_.push_back(std::move(perms));
    }
    cursor_.assign(per_var_.size(), 0);
  }

  std::optional<Renaming> next() {
    if (done_) return std::nullopt;
    Renaming r;
    r.value_map.reserve(per_var_.size());
    for (std::size_t i = 0; i < per_var_.size(); ++i)
      r.value_map.push_back(per_var_[i][static_cast<std::size_t>(cursor_[i])]);
    // advance, last variable fastest
    done_ = true;
    for (std::size_t i = per_var_.size(); i-- > 0;) {
      if (++cursor_[i] < static_cast<int>(per_var_[i].size())) {
        done_ = false;
        break;
      }
      cursor_[i] = 0;
    }
    if (per_var_.empty()) done_ = true;
    return r;
  }

private:
  std::vector<std::vector<std::vector<int>>> per_var_;
  std::vector<int> cursor_;
  bool done_ = false;
};

}  // namespace detail

// Labels a generating set of VV symmetries:
//   count   every generator preserves counts as-is
//   srv     one renaming turns every generator into a count symmetry
//   urv     each generator has its own such renaming
//   equicardinal_noncount otherwise
// The renaming search is exhaustive and lexicographic; the first witness wins.
inline TaxonomyReport classify_taxonomy(const GraphicalModel& g,
                                        const std::vector<VVPermutation>& generators,
                                        std::uint64_t state_cap = kDefaultStateCap,
                                        std::uint64_t renaming_cap = kDefaultRenamingCap) {
  const VVLayout layout = VVLayout::of(g);
  TaxonomyReport report;
  report.per_generator.resize(generators.size());

  bool all_count = true;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (is_count_symmetry(g, generators[k], state_cap)) {
      report.per_generator[k].label = TaxonomyLabel::count;
    } else {
      all_count = false;
      report.per_generator[k].label = TaxonomyLabel::equicardinal_noncount;  // refined below
    }
  }
  if (all_count) {
    report.group_label = TaxonomyLabel::count;
    return report;
  }

  // single renaming for the whole generating set
  detail::RenamingEnumerator srv(g, renaming_cap);
  while (auto r = srv.next()) {
    bool ok = true;
    for (const VVPermutation& phi : generators) {
      if (!is_count_symmetry(g, conjugate_by_renaming(layout, *r, phi), state_cap)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      report.group_label = TaxonomyLabel::srv_count;
      report.witness = *r;
      for (std::size_t k = 0; k < generators.size(); ++k) {
        if (report.per_generator[k].label != TaxonomyLabel::count) {
          report.per_generator[k].label = TaxonomyLabel::srv_count;
          report.per_generator[k].witness = *r;
        }
      }
      return report;
    }
  }

  // per-generator renamings
  bool all_renamable = true;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (report.per_generator[k].label == TaxonomyLabel::count) continue;
    bool found = false;
    detail::RenamingEnumerator en(g, renaming_cap);
    while (auto r = en.next()) {
      if (is_count_symmetry(g, conjugate_by_renaming(layout, *r, generators[k]), state_cap)) {
        report.per_generator[k].label = TaxonomyLabel::srv_count;
        report.per_generator[k].witness = *r;
        found = true;
        break;
      }
    }
    if (!found) all_renamable = false;
  }
  report.group_label = all_renamable ? TaxonomyLabel::urv_count : TaxonomyLabel::equicardinal_noncount;
  return report;
}

// States grouped by exact probability; orbits of any symmetry group refine
// this partition.
inline std::vector<std::vector<std::uint64_t>> equal_probability_partition(
    const GraphicalModel& g, std::uint64_t cap = kDefaultStateCap, double tol = 1e-12) {
  const ExactDistribution d = exact_distribution(g, HardPolicy::exact_infinity(), cap);
  std::vector<std::uint64_t> order(d.p.size());
  for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (d.p[a] != d.p[b]) return d.p[a] > d.p[b];
    return a < b;
  });
  std::vector<std::vector<std::uint64_t>> classes;
  for (std::uint64_t idx : order) {
    if (classes.empty() || std::abs(d.p[classes.back().back()] - d.p[idx]) > tol)
      classes.emplace_back();
    classes.back().push_back(idx);
  }
  return classes;
}

}  // namespace pgmsym

#endif
