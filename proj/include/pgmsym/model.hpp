#ifndef PGMSYM_MODEL_HPP
#define PGMSYM_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pgmsym/errors.hpp"

namespace pgmsym {

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;
inline constexpr double kDefaultHardWeight = 30.0;

// Hard constraints are stored with an infinite weight. Samplers substitute a
// large finite weight to keep chains ergodic; the exact oracle zeroes out
// violating states.
inline double hard_weight_sentinel() { return std::numeric_limits<double>::infinity(); }
inline bool is_hard(double w) { return std::isinf(w); }

// Weights are compared after rounding to 1e-9; features whose rounded weights
// agree belong to one color class in the symmetry graphs.
inline std::int64_t weight_key(double w) {
  if (is_hard(w)) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::llround(w * 1e9));
}

struct Variable {
  int id = 0;
  std::string name;
  int cardinality = 0;  // values are 0..cardinality-1
};

// positive means "var == value", negative means "var != value"
struct Literal {
  int var = 0;
  int value = 0;
  bool positive = true;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.var == b.var && a.value == b.value && a.positive == b.positive;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.var != b.var) return a.var < b.var;
    if (a.value != b.value) return a.value < b.value;
    return a.positive < b.positive;
  }
};

struct Feature {
  std::vector<Literal> literals;
  double weight = 0.0;
};

enum class FeatureKind { clausal, conjunctive };

struct State {
  std::vector<int> values;

  friend bool operator==(const State& a, const State& b) { return a.values == b.values; }
  friend bool operator<(const State& a, const State& b) { return a.values < b.values; }
};

struct GraphicalModel {
  FeatureKind kind = FeatureKind::clausal;
  std::vector<Variable> variables;
  std::vector<Feature> features;

  int var_count() const { return static_cast<int>(variables.size()); }
  int feature_count() const { return static_cast<int>(features.size()); }
  int cardinality(int var) const { return variables[static_cast<std::size_t>(var)].cardinality; }
};

inline void validate_model(const GraphicalModel& g) {
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    if (g.variables[i].id != static_cast<int>(i))
      throw ValidationError("variable ids must be dense and in order");
    if (g.variables[i].cardinality < 1)
      throw ValidationError("variable '" + g.variables[i].name + "' has empty domain");
  }
  for (const Feature& f : g.features) {
    if (f.literals.empty()) throw ValidationError("feature with no literals");
    for (const Literal& l : f.literals) {
      if (l.var < 0 || l.var >= g.var_count()) throw ValidationError("literal references unknown variable");
      if (l.value < 0 || l.value >= g.cardinality(l.var))
        throw ValidationError("literal value out of range for variable '" +
                              g.variables[static_cast<std::size_t>(l.var)].name + "'");
    }
  }
}

inline bool valid_state(const GraphicalModel& g, const State& s) {
  if (static_cast<int>(s.values.size()) != g.var_count()) return false;
  for (int i = 0; i < g.var_count(); ++i)
    if (s.values[static_cast<std::size_t>(i)] < 0 || s.values[static_cast<std::size_t>(i)] >= g.cardinality(i))
      return false;
  return true;
}

inline bool literal_true(const Literal& l, const State& s) {
  return (s.values[static_cast<std::size_t>(l.var)] == l.value) == l.positive;
}

inline bool evaluate_feature(FeatureKind kind, const Feature& f, const State& s) {
  if (kind == FeatureKind::clausal) {
    for (const Literal& l : f.literals)
      if (literal_true(l, s)) return true;
    return false;
  }
  for (const Literal& l : f.literals)
    if (!literal_true(l, s)) return false;
  return true;
}

struct HardPolicy {
  bool truly_hard = true;
  double substitute = kDefaultHardWeight;

  // Violated hard features send the state's probability to zero.
  static HardPolicy exact_infinity() { return {true, 0.0}; }
  // Hard features act as ordinary features with the given weight.
  static HardPolicy soft(double w) { return {false, w}; }
};

// Sum of weights of satisfied features. Under the truly-hard policy a violated
// hard feature yields -infinity; satisfied hard features contribute nothing
// (the constant cancels in normalization).
inline double log_weight(const GraphicalModel& g, const State& s,
                         const HardPolicy& policy = HardPolicy::soft(kDefaultHardWeight)) {
  double total = 0.0;
  for (const Feature& f : g.features) {
    const bool sat = evaluate_feature(g.kind, f, s);
    if (is_hard(f.weight)) {
      if (policy.truly_hard) {
        if (!sat) return -std::numeric_limits<double>::infinity();
      } else if (sat) {
        total += policy.substitute;
      }
    } else if (sat) {
      total += f.weight;
    }
  }
  return total;
}

// Dense mixed-radix indexing of complete assignments; variable 0 is the least
// significant digit.
class StateIndexer {
public:
  StateIndexer(std::vector<int> cards, std::uint64_t cap) : cards_(std::move(cards)) {
    stride_.resize(cards_.size());
    std::uint64_t acc = 1;
    for (std::size_t i = 0; i < cards_.size(); ++i) {
      stride_[i] = acc;
      if (cards_[i] <= 0) throw ValidationError("empty domain");
      if (acc > cap / static_cast<std::uint64_t>(cards_[i]))
        throw StateSpaceTooLarge("state space exceeds cap of " + std::to_string(cap));
      acc *= static_cast<std::uint64_t>(cards_[i]);
    }
    size_ = acc;
  }

  explicit StateIndexer(const GraphicalModel& g, std::uint64_t cap = kDefaultStateCap)
      : StateIndexer(collect_cards(g), cap) {}

  std::uint64_t size() const { return size_; }
  int var_count() const { return static_cast<int>(cards_.size()); }

  std::uint64_t encode(const State& s) const {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < cards_.size(); ++i)
      idx += stride_[i] * static_cast<std::uint64_t>(s.values[i]);
    return idx;
  }

  State decode(std::uint64_t idx) const {
    State s;
    s.values.resize(cards_.size());
    for (std::size_t i = 0; i < cards_.size(); ++i) {
      s.values[i] = static_cast<int>(idx % static_cast<std::uint64_t>(cards_[i]));
      idx /= static_cast<std::uint64_t>(cards_[i]);
    }
    return s;
  }

private:
  static std::vector<int> collect_cards(const GraphicalModel& g) {
    std::vector<int> cards;
    cards.reserve(g.variables.size());
    for (const Variable& v : g.variables) cards.push_back(v.cardinality);
    return cards;
  }

  std::vector<int> cards_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t size_ = 0;
};

struct ExactDistribution {
  StateIndexer indexer;
  std::vector<double> p;  // indexed by state index, sums to 1
};

inline ExactDistribution exact_distribution(const GraphicalModel& g,
                                            const HardPolicy& policy = HardPolicy::exact_infinity(),
                                            std::uint64_t cap = kDefaultStateCap) {
  StateIndexer indexer(g, cap);
  const std::uint64_t n = indexer.size();
  std::vector<double> lw(n);
  double maxlw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n; ++i) {
    lw[i] = log_weight(g, indexer.decode(i), policy);
    maxlw = std::max(maxlw, lw[i]);
  }
  if (!std::isfinite(maxlw)) throw ValidationError("no state satisfies all hard constraints");
  double z = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    lw[i] = std::exp(lw[i] - maxlw);
    z += lw[i];
  }
  for (std::uint64_t i = 0; i < n; ++i) lw[i] /= z;
  return ExactDistribution{std::move(indexer), std::move(lw)};
}

// marginals[var][value]; each row sums to 1
inline std::vector<std::vector<double>> exact_marginals(const GraphicalModel& g,
                                                        const HardPolicy& policy = HardPolicy::exact_infinity(),
                                                        std::uint64_t cap = kDefaultStateCap) {
  ExactDistribution d = exact_distribution(g, policy, cap);
  std::vector<std::vector<double>> m(static_cast<std::size_t>(g.var_count()));
  for (int i = 0; i < g.var_count(); ++i)
    m[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(g.cardinality(i)), 0.0);
  for (std::uint64_t idx = 0; idx < d.indexer.size(); ++idx) {
    const State s = d.indexer.decode(idx);
    for (int i = 0; i < g.var_count(); ++i)
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(s.values[static_cast<std::size_t>(i)])] += d.p[idx];
  }
  return m;
}

// A feature is a Boolean function of its literals: per mentioned variable it
// admits a set of values, the union of the literals' value sets for a clause
// and the intersection for a conjunction. Everything that compares or wires
// features works off these sets, so equivalent literal spellings coincide.
// Returned sorted by variable; a conjunction with an empty set somewhere is
// unsatisfiable and reports exactly one empty entry.
inline std::vector<std::pair<int, std::vector<int>>> feature_value_sets(FeatureKind kind,
                                                                        const Feature& f,
                                                                        const std::vector<int>& cards) {
  std::map<int, std::vector<char>> admit;
  for (const Literal& l : f.literals) {
    const int card = cards[static_cast<std::size_t>(l.var)];
    auto [it, fresh] = admit.try_emplace(l.var);
    if (fresh) it->second.assign(static_cast<std::size_t>(card), kind == FeatureKind::clausal ? 0 : 1);
    std::vector<char> lit(static_cast<std::size_t>(card), l.positive ? 0 : 1);
    lit[static_cast<std::size_t>(l.value)] = l.positive ? 1 : 0;
    for (int v = 0; v < card; ++v) {
      if (kind == FeatureKind::clausal)
        it->second[static_cast<std::size_t>(v)] |= lit[static_cast<std::size_t>(v)];
      else
        it->second[static_cast<std::size_t>(v)] &= lit[static_cast<std::size_t>(v)];
    }
  }
  std::vector<std::pair<int, std::vector<int>>> out;
  for (const auto& [var, mask] : admit) {
    std::vector<int> values;
    for (int v = 0; v < static_cast<int>(mask.size()); ++v)
      if (mask[static_cast<std::size_t>(v)]) values.push_back(v);
    if (kind == FeatureKind::clausal) {
      if (values.empty()) continue;  // the variable cannot satisfy the clause
    } else {
      if (static_cast<int>(values.size()) == cards[static_cast<std::size_t>(var)])
        continue;  // the variable is unconstrained
      if (values.empty()) return {{var, {}}};  // contradiction, feature never fires
    }
    out.push_back({var, std::move(values)});
  }
  return out;
}

// Canonical form: literals rebuilt from the per-variable value sets (positives
// enumerating a clause's admitted values; a conjunction keeps a positive for a
// pinned value and negatives for the excluded ones), sorted, features ordered
// by (rounded weight, literal list). Model identity compares this form, so
// it is insensitive to how a feature was spelled.
inline Feature canonical_feature(FeatureKind kind, Feature f, const std::vector<int>& cards) {
  const auto sets = feature_value_sets(kind, f, cards);
  f.literals.clear();
  for (const auto& [var, values] : sets) {
    if (kind == FeatureKind::clausal) {
      for (int v : values) f.literals.push_back(Literal{var, v, true});
    } else if (values.empty()) {
      // unsatisfiable conjunction: one fixed contradictory pair
      f.literals = {Literal{0, 0, true}, Literal{0, 0, false}};
      break;
    } else if (values.size() == 1) {
      f.literals.push_back(Literal{var, values.front(), true});
    } else {
      std::vector<char> in(cards[static_cast<std::size_t>(var)], 0);
      for (int v : values) in[static_cast<std::size_t>(v)] = 1;
      for (int v = 0; v < cards[static_cast<std::size_t>(var)]; ++v)
        if (!in[static_cast<std::size_t>(v)]) f.literals.push_back(Literal{var, v, false});
    }
  }
  std::sort(f.literals.begin(), f.literals.end());
  return f;
}

inline GraphicalModel canonical(GraphicalModel g) {
  std::vector<int> cards;
  cards.reserve(g.variables.size());
  for (const Variable& v : g.variables) cards.push_back(v.cardinality);
  for (Feature& f : g.features) f = canonical_feature(g.kind, std::move(f), cards);
  std::sort(g.features.begin(), g.features.end(), [](const Feature& a, const Feature& b) {
    const std::int64_t ka = weight_key(a.weight), kb = weight_key(b.weight);
    if (ka != kb) return ka < kb;
    return a.literals < b.literals;
  });
  return g;
}

// Equality of canonical forms. Variable names are irrelevant to symmetry;
// only the domain sizes and the feature structure matter.
inline bool canonical_equal(const GraphicalModel& a, const GraphicalModel& b) {
  if (a.kind != b.kind || a.variables.size() != b.variables.size() || a.features.size() != b.features.size())
    return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i)
    if (a.variables[i].cardinality != b.variables[i].cardinality) return false;
  const GraphicalModel ca = canonical(a);
  const GraphicalModel cb = canonical(b);
  for (std::size_t j = 0; j < ca.features.size(); ++j) {
    if (weight_key(ca.features[j].weight) != weight_key(cb.features[j].weight)) return false;
    if (!(ca.features[j].literals == cb.features[j].literals)) return false;
  }
  return true;
}

// Complement model on negated literals with negated weights; defines the same
// distribution up to a constant. Hard weights have no finite negation.
inline GraphicalModel demorgan_dual(const GraphicalModel& g) {
  GraphicalModel d = g;
  d.kind = g.kind == FeatureKind::clausal ? FeatureKind::conjunctive : FeatureKind::clausal;
  for (Feature& f : d.features) {
    if (is_hard(f.weight)) throw ValidationError("dual of a hard feature is not representable");
    f.weight = -f.weight;
    for (Literal& l : f.literals) l.positive = !l.positive;
  }
  return d;
}

// ---- text format ----------------------------------------------------------
//
//   # comment
//   mode clausal|conjunctive
//   var <name> <cardinality>
//   feature <weight|HARD> <lit> [<lit> ...]     lit := [!]name=value

namespace detail {
inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}
}  // namespace detail

inline GraphicalModel parse_model(std::istream& in) {
  GraphicalModel g;
  std::map<std::string, int> var_ids;
  std::string line;
  int lineno = 0;
  bool saw_feature = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "mode") {
      if (tok.size() != 2) throw ParseError(lineno, "expected: mode clausal|conjunctive");
      if (saw_feature) throw ParseError(lineno, "mode must precede features");
      if (tok[1] == "clausal") g.kind = FeatureKind::clausal;
      else if (tok[1] == "conjunctive") g.kind = FeatureKind::conjunctive;
      else throw ParseError(lineno, "unknown mode '" + tok[1] + "'");
    } else if (tok[0] == "var") {
      if (tok.size() != 3) throw ParseError(lineno, "expected: var <name> <cardinality>");
      if (var_ids.count(tok[1])) throw ParseError(lineno, "duplicate variable '" + tok[1] + "'");
      int card = 0;
      try {
        card = std::stoi(tok[2]);
      } catch (const std::exception&) {
        throw ParseError(lineno, "bad cardinality '" + tok[2] + "'");
      }
      if (card < 1) throw ParseError(lineno, "cardinality must be at least 1");
      const int id = g.var_count();
      var_ids[tok[1]] = id;
      g.variables.push_back(Variable{id, tok[1], card});
    } else if (tok[0] == "feature") {
      if (tok.size() < 3) throw ParseError(lineno, "expected: feature <weight> <lit> ...");
      Feature f;
      if (tok[1] == "HARD") {
        f.weight = hard_weight_sentinel();
      } else {
        std::size_t pos = 0;
        try {
          f.weight = std::stod(tok[1], &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != tok[1].size()) throw ParseError(lineno, "bad weight '" + tok[1] + "'");
      }
      for (std::size_t t = 2; t < tok.size(); ++t) {
        std::string lit = tok[t];
        Literal l;
        if (!lit.empty() && lit[0] == '!') {
          l.positive = false;
          lit.erase(lit.begin());
        }
        const std::size_t eq = lit.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == lit.size())
          throw ParseError(lineno, "bad literal '" + tok[t] + "'");
        const std::string name = lit.substr(0, eq);
        const auto it = var_ids.find(name);
        if (it == var_ids.end()) throw ParseError(lineno, "unknown variable '" + name + "'");
        l.var = it->second;
        try {
          l.value = std::stoi(lit.substr(eq + 1));
        } catch (const std::exception&) {
          throw ParseError(lineno, "bad value in literal '" + tok[t] + "'");
        }
        if (l.value < 0 || l.value >= g.cardinality(l.var))
          throw ParseError(lineno, "value " + std::to_string(l.value) + " out of range for '" + name + "'");
        f.literals.push_back(l);
      }
      g.features.push_back(std::move(f));
      saw_feature = true;
    } else {
      throw ParseError(lineno, "unknown statement '" + tok[0] + "'");
    }
  }
  validate_model(g);
  return g;
}

inline GraphicalModel parse_model(const std::string& text) {
  std::istringstream ss(text);
  return parse_model(ss);
}

inline std::string format_weight(double w) {
  if (is_hard(w)) return "HARD";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

inline void serialize_model(const GraphicalModel& g, std::ostream& out) {
  out << "mode " << (g.kind == FeatureKind::clausal ? "clausal" : "conjunctive") << "\n";
  for (const Variable& v : g.variables) out << "var " << v.name << " " << v.cardinality << "\n";
  for (const Feature& f : g.features) {
    out << "feature " << format_weight(f.weight);
    for (const Literal& l : f.literals) {
      out << " " << (l.positive ? "" : "!") << g.variables[static_cast<std::size_t>(l.var)].name << "="
          << l.value;
    }
    out << "\n";
  }
}

inline std::string serialize_model(const GraphicalModel& g) {
  std::ostringstream ss;
  serialize_model(g, ss);
  return ss.str();
}

}  // namespace pgmsym

#endif
