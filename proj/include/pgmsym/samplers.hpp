#ifndef PGMSYM_SAMPLERS_HPP
#define PGMSYM_SAMPLERS_HPP

#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/permgroup.hpp"
#include "pgmsym/reduction.hpp"
#include "pgmsym/symmetry.hpp"

namespace pgmsym {

inline constexpr std::uint64_t kKernelStateCap = 4096;

enum class Algorithm { gibbs, orbital, vv_orbital, nec_orbital };

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::gibbs: return "gibbs";
    case Algorithm::orbital: return "orbital";
    case Algorithm::vv_orbital: return "vv-orbital";
    case Algorithm::nec_orbital: return "nec-orbital";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  if (s == "gibbs") return Algorithm::gibbs;
  if (s == "orbital") return Algorithm::orbital;
  if (s == "vv-orbital") return Algorithm::vv_orbital;
  if (s == "nec-orbital") return Algorithm::nec_orbital;
  return std::nullopt;
}

enum class OrbitStrategy { exact_bfs, pra };

struct ChainConfig {
  Algorithm algorithm = Algorithm::gibbs;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  OrbitStrategy orbit_strategy = OrbitStrategy::exact_bfs;
  std::uint64_t burn_in = 0;
  double hard_weight = kDefaultHardWeight;
  std::uint64_t orbit_cap = kDefaultOrbitCap;
  std::uint64_t snapshot_every = 0;  // 0: only a final snapshot
};

// Symmetry artifacts the chains act with; all shared read-only.
struct SymmetryInputs {
  const GeneratorSet* variable_group = nullptr;               // orbital
  const std::vector<VVPermutation>* vv_group = nullptr;       // vv-orbital
  const ReducedModel* reduced = nullptr;                      // nec-orbital
  const std::vector<VVPermutation>* reduced_group = nullptr;  // nec-orbital
};

inline void validate_config(const ChainConfig& cfg, const SymmetryInputs& inputs) {
  if (cfg.steps == 0) throw ConfigError("steps must be positive");
  if (cfg.algorithm == Algorithm::orbital && inputs.variable_group == nullptr)
    throw ConfigError("orbital sampling needs a variable symmetry group");
  if (cfg.algorithm == Algorithm::vv_orbital && inputs.vv_group == nullptr)
    throw ConfigError("vv-orbital sampling needs a VV symmetry group");
  if (cfg.algorithm == Algorithm::nec_orbital &&
      (inputs.reduced == nullptr || inputs.reduced_group == nullptr))
    throw ConfigError("nec-orbital sampling needs a reduced model and its symmetry group");
}

// Random-scan Gibbs over exact full conditionals. Hard features act with the
// configured finite weight so the chain stays ergodic.
class GibbsSampler {
public:
  GibbsSampler(const GraphicalModel& g, double hard_weight) : g_(&g), hard_(hard_weight) {
    feats_of_.resize(g.variables.size());
    for (int j = 0; j < g.feature_count(); ++j)
      for (const Literal& l : g.features[static_cast<std::size_t>(j)].literals) {
        auto& list = feats_of_[static_cast<std::size_t>(l.var)];
        if (list.empty() || list.back() != j) list.push_back(j);
      }
  }

  const GraphicalModel& model() const { return *g_; }

  std::vector<double> conditional(const State& s, int var) const {
    const int card = g_->cardinality(var);
    std::vector<double> logw(static_cast<std::size_t>(card), 0.0);
    State probe = s;
    for (int v = 0; v < card; ++v) {
      probe.values[static_cast<std::size_t>(var)] = v;
      double acc = 0.0;
      for (int j : feats_of_[static_cast<std::size_t>(var)]) {
        const Feature& f = g_->features[static_cast<std::size_t>(j)];
        if (evaluate_feature(g_->kind, f, probe)) acc += is_hard(f.weight) ? hard_ : f.weight;
      }
      logw[static_cast<std::size_t>(v)] = acc;
    }
    double mx = logw[0];
    for (double w : logw) mx = std::max(mx, w);
    double z = 0.0;
    for (double& w : logw) {
      w = std::exp(w - mx);
      z += w;
    }
    for (double& w : logw) w /= z;
    return logw;
  }

  template <class Rng>
  State step(const State& s, Rng& rng) const {
    std::uniform_int_distribution<int> pick_var(0, g_->var_count() - 1);
    const int var = pick_var(rng);
    const std::vector<double> probs = conditional(s, var);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    int value = g_->cardinality(var) - 1;
    for (int v = 0; v < g_->cardinality(var); ++v) {
      acc += probs[static_cast<std::size_t>(v)];
      if (u < acc) {
        value = v;
        break;
      }
    }
    State out = s;
    out.values[static_cast<std::size_t>(var)] = value;
    return out;
  }

private:
  const GraphicalModel* g_;
  double hard_;
  std::vector<std::vector<int>> feats_of_;
};

// BFS closure of a state under VV permutations, sorted lexicographically.
inline std::vector<State> state_orbit(const VVLayout& layout, const std::vector<VVPermutation>& gens,
                                      const State& s, std::uint64_t cap = kDefaultOrbitCap) {
  std::set<State> seen;
  std::vector<State> queue{s};
  seen.insert(s);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const State cur = queue[head];
    for (const VVPermutation& phi : gens) {
      State next = apply_vv_to_state(layout, phi, cur);
      if (seen.insert(next).second) {
        if (seen.size() > cap) throw OrbitCapExceeded("state orbit exceeds cap");
        queue.push_back(std::move(next));
      }
    }
  }
  return std::vector<State>(seen.begin(), seen.end());
}

// Uniform draw from the orbit of s. The exact strategy enumerates the orbit;
// the product-replacement strategy applies a near-uniform random group
// element, which lands uniformly on the orbit. Trivial groups and singleton
// orbits return s without touching the generator.
template <class Rng>
State orbital_move(const VVLayout& layout, const std::vector<VVPermutation>& gens,
                   OrbitStrategy strategy, PraSampler* pra, const State& s, Rng& rng,
                   std::uint64_t cap = kDefaultOrbitCap) {
  if (gens.empty()) return s;
  if (strategy == OrbitStrategy::pra) {
    return apply_vv_perm_to_state(layout, pra->next(), s);
  }
  const std::vector<State> orbit = state_orbit(layout, gens, s, cap);
  if (orbit.size() == 1) return s;
  std::uniform_int_distribution<std::size_t> pick(0, orbit.size() - 1);
  return orbit[pick(rng)];
}

struct NecMoveResult {
  State next;
  State current_rep;   // representative before the move
  State proposed_rep;  // proposed representative
  bool proposed_self = false;
  bool accepted = true;
};

// Orbit move across suborbits of different sizes: propose a representative
// uniformly from the reduced-model orbit, accept with min(1, c(new)/c(cur)) so
// representatives are visited proportionally to their suborbit size, then draw
// uniformly inside the winning suborbit. Rejection still redraws inside the
// current suborbit; its members are equiprobable, so stationarity is kept.
template <class Rng>
NecMoveResult nec_orbital_move(const ReducedModel& r, const std::vector<VVPermutation>& reduced_gens,
                               OrbitStrategy strategy, PraSampler* pra, const State& s, Rng& rng,
                               std::uint64_t cap = kDefaultOrbitCap) {
  const VVLayout red_layout = VVLayout::of(r.model);
  NecMoveResult res;
  res.current_rep = rep_state(s, r.classes);
  const State u_red = to_reduced_state(r, res.current_rep);

  State proposed_red = u_red;
  if (!reduced_gens.empty()) {
    if (strategy == OrbitStrategy::pra) {
      proposed_red = apply_vv_perm_to_state(red_layout, pra->next(), u_red);
    } else {
      const std::vector<State> orbit = state_orbit(red_layout, reduced_gens, u_red, cap);
      if (orbit.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, orbit.size() - 1);
        proposed_red = orbit[pick(rng)];
      }
    }
  }
  res.proposed_rep = from_reduced_state(r, proposed_red);
  res.proposed_self = res.proposed_rep == res.current_rep;

  State winner = res.current_rep;
  if (!res.proposed_self) {
    const double c_cur = static_cast<double>(suborbit_size(res.current_rep, r.classes));
    const double c_new = static_cast<double>(suborbit_size(res.proposed_rep, r.classes));
    const double a = std::min(1.0, c_new / c_cur);
    if (a >= 1.0) {
      winner = res.proposed_rep;
    } else {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      res.accepted = unit(rng) < a;
      if (res.accepted) winner = res.proposed_rep;
    }
  }

  res.next = winner;
  for (std::size_t i = 0; i < res.next.values.size(); ++i) {
    const auto& cls = r.classes.class_members(static_cast<int>(i), winner.values[i]);
    if (cls.size() == 1) continue;
    std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
    res.next.values[i] = cls[pick(rng)];
  }
  return res;
}

struct Snapshot {
  std::uint64_t step = 0;
  double wall_ms = 0.0;
  std::vector<std::vector<double>> marginals;  // [var][value]
};

struct ChainResult {
  std::vector<Snapshot> snapshots;
  std::vector<std::vector<double>> marginals;          // final estimates
  std::vector<std::vector<std::uint64_t>> tallies;     // per (var, value) visit counts
  std::uint64_t tallied_steps = 0;
};

namespace detail {

class ChainRunner {
public:
  ChainRunner(const GraphicalModel& g, const ChainConfig& cfg, const SymmetryInputs& inputs)
      : g_(&g), cfg_(cfg), layout_(VVLayout::of(g)), gibbs_(g, cfg.hard_weight), rng_(cfg.seed) {
    validate_config(cfg, inputs);
    switch (cfg.algorithm) {
      case Algorithm::gibbs:
        break;
      case Algorithm::orbital:
        for (const Permutation& theta : inputs.variable_group->generators)
          action_.push_back(embed_variable_symmetry(g, theta));
        break;
      case Algorithm::vv_orbital:
        action_ = *inputs.vv_group;
        break;
      case Algorithm::nec_orbital:
        reduced_ = inputs.reduced;
        reduced_action_ = *inputs.reduced_group;
        break;
    }
    if (cfg.orbit_strategy == OrbitStrategy::pra) {
      if (cfg.algorithm == Algorithm::nec_orbital) {
        GeneratorSet gens{VVLayout::of(reduced_->model).total, {}};
        for (const VVPermutation& phi : reduced_action_) gens.generators.push_back(phi.perm());
        pra_ = std::make_unique<PraSampler>(gens, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      } else if (!action_.empty()) {
        GeneratorSet gens{layout_.total, {}};
        for (const VVPermutation& phi : action_) gens.generators.push_back(phi.perm());
        pra_ = std::make_unique<PraSampler>(gens, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      }
    }
  }

  State initial_state() {
    State s;
    s.values.resize(static_cast<std::size_t>(g_->var_count()));
    for (int i = 0; i < g_->var_count(); ++i) {
      std::uniform_int_distribution<int> pick(0, g_->cardinality(i) - 1);
      s.values[static_cast<std::size_t>(i)] = pick(rng_);
    }
    return s;
  }

  State advance(const State& s) {
    State next = gibbs_.step(s, rng_);
    switch (cfg_.algorithm) {
      case Algorithm::gibbs:
        break;
      case Algorithm::orbital:
      case Algorithm::vv_orbital: {
        State moved =
            orbital_move(layout_, action_, cfg_.orbit_strategy, pra_.get(), next, rng_, cfg_.orbit_cap);
        assert(std::abs(log_weight(*g_, moved, HardPolicy::soft(cfg_.hard_weight)) -
                        log_weight(*g_, next, HardPolicy::soft(cfg_.hard_weight))) < 1e-12);
        next = std::move(moved);
        break;
      }
      case Algorithm::nec_orbital: {
        NecMoveResult res = nec_orbital_move(*reduced_, reduced_action_, cfg_.orbit_strategy,
                                             pra_.get(), next, rng_, cfg_.orbit_cap);
        assert(std::abs(log_weight(*g_, res.next, HardPolicy::soft(cfg_.hard_weight)) -
                        log_weight(*g_, next, HardPolicy::soft(cfg_.hard_weight))) < 1e-12);
        next = std::move(res.next);
        break;
      }
    }
    return next;
  }

  ChainResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    ChainResult result;
    result.tallies.resize(static_cast<std::size_t>(g_->var_count()));
    for (int i = 0; i < g_->var_count(); ++i)
      result.tallies[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(g_->cardinality(i)), 0);

    State s = initial_state();
    for (std::uint64_t b = 0; b < cfg_.burn_in; ++b) s = advance(s);
    for (std::uint64_t step = 1; step <= cfg_.steps; ++step) {
      s = advance(s);
      for (int i = 0; i < g_->var_count(); ++i)
        ++result.tallies[static_cast<std::size_t>(i)][static_cast<std::size_t>(s.values[static_cast<std::size_t>(i)])];
      ++result.tallied_steps;
      const bool snap = (cfg_.snapshot_every > 0 && step % cfg_.snapshot_every == 0) || step == cfg_.steps;
      if (snap) {
        Snapshot shot;
        shot.step = step;
        shot.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        shot.marginals = estimates(result);
        result.snapshots.push_back(std::move(shot));
      }
    }
    result.marginals = estimates(result);
    return result;
  }

private:
  std::vector<std::vector<double>> estimates(const ChainResult& r) const {
    std::vector<std::vector<double>> m(r.tallies.size());
    for (std::size_t i = 0; i < r.tallies.size(); ++i) {
      m[i].resize(r.tallies[i].size());
      for (std::size_t v = 0; v < r.tallies[i].size(); ++v)
        m[i][v] = r.tallied_steps == 0 ? 0.0
                                       : static_cast<double>(r.tallies[i][v]) /
                                             static_cast<double>(r.tallied_steps);
    }
    return m;
  }

  const GraphicalModel* g_;
  ChainConfig cfg_;
  VVLayout layout_;
  GibbsSampler gibbs_;
  std::mt19937_64 rng_;
  std::vector<VVPermutation> action_;
  const ReducedModel* reduced_ = nullptr;
  std::vector<VVPermutation> reduced_action_;
  std::unique_ptr<PraSampler> pra_;
};

}  // namespace detail

// Deterministic given (model, config, seed).
inline ChainResult run_chain(const GraphicalModel& g, const ChainConfig& cfg,
                             const SymmetryInputs& inputs = {}) {
  detail::ChainRunner runner(g, cfg, inputs);
  return runner.run();
}

// Row-stochastic one-step transition matrix of the configured sampler, by
// exact expectation over every random choice. Orbit draws are taken as exact
// uniform draws, the limit the product-replacement strategy approximates.
struct ExplicitKernel {
  StateIndexer indexer;
  std::vector<double> matrix;  // row-major
  std::uint64_t n = 0;

  double at(std::uint64_t s, std::uint64_t t) const { return matrix[s * n + t]; }
};

namespace detail {

inline std::vector<double> gibbs_kernel_matrix(const GraphicalModel& g, const GibbsSampler& gibbs,
                                               const StateIndexer& indexer) {
  const std::uint64_t n = indexer.size();
  std::vector<double> k(n * n, 0.0);
  const double var_prob = 1.0 / g.var_count();
  for (std::uint64_t si = 0; si < n; ++si) {
    const State s = indexer.decode(si);
    for (int var = 0; var < g.var_count(); ++var) {
      const std::vector<double> cond = gibbs.conditional(s, var);
      State t = s;
      for (int v = 0; v < g.cardinality(var); ++v) {
        t.values[static_cast<std::size_t>(var)] = v;
        k[si * n + indexer.encode(t)] += var_prob * cond[static_cast<std::size_t>(v)];
      }
    }
  }
  return k;
}

// Orbit partition over all state indices under VV generators.
inline std::vector<std::vector<std::uint64_t>> state_orbit_partition(
    const VVLayout& layout, const std::vector<VVPermutation>& gens, const StateIndexer& indexer) {
  const std::uint64_t n = indexer.size();
  std::vector<char> done(n, 0);
  std::vector<std::vector<std::uint64_t>> orbits;
  for (std::uint64_t s = 0; s < n; ++s) {
    if (done[s]) continue;
    std::vector<std::uint64_t> orbit{s};
    done[s] = 1;
    for (std::size_t head = 0; head < orbit.size(); ++head) {
      const State cur = indexer.decode(orbit[head]);
      for (const VVPermutation& phi : gens) {
        const std::uint64_t t = indexer.encode(apply_vv_to_state(layout, phi, cur));
        if (!done[t]) {
          done[t] = 1;
          orbit.push_back(t);
        }
      }
    }
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

inline std::vector<double> orbit_kernel_matrix(const std::vector<std::vector<std::uint64_t>>& orbits,
                                               std::uint64_t n) {
  std::vector<double> k(n * n, 0.0);
  for (const auto& orbit : orbits) {
    const double p = 1.0 / static_cast<double>(orbit.size());
    for (std::uint64_t s : orbit)
      for (std::uint64_t t : orbit) k[s * n + t] = p;
  }
  return k;
}

// Suborbit members of a representative state, as indices.
inline std::vector<std::uint64_t> suborbit_indices(const ReducedModel& r, const StateIndexer& indexer,
                                                   const State& rep) {
  std::vector<std::uint64_t> out;
  State cur = rep;
  std::vector<std::size_t> cursor(rep.values.size(), 0);
  for (;;) {
    for (std::size_t i = 0; i < rep.values.size(); ++i)
      cur.values[i] = r.classes.class_members(static_cast<int>(i), rep.values[i])[cursor[i]];
    out.push_back(indexer.encode(cur));
    std::size_t i = 0;
    for (; i < cursor.size(); ++i) {
      const std::size_t limit =
          r.classes.class_members(static_cast<int>(i), rep.values[i]).size();
      if (++cursor[i] < limit) break;
      cursor[i] = 0;
    }
    if (i == cursor.size()) break;
  }
  return out;
}

inline std::vector<double> nec_kernel_matrix(const ReducedModel& r,
                                             const std::vector<VVPermutation>& reduced_gens,
                                             const StateIndexer& indexer) {
  const std::uint64_t n = indexer.size();
  const VVLayout red_layout = VVLayout::of(r.model);
  const StateIndexer red_indexer(r.model, n);
  const auto red_orbits = state_orbit_partition(red_layout, reduced_gens, red_indexer);
  std::vector<int> orbit_of(red_indexer.size());
  for (std::size_t o = 0; o < red_orbits.size(); ++o)
    for (std::uint64_t u : red_orbits[o]) orbit_of[u] = static_cast<int>(o);

  std::vector<double> k(n * n, 0.0);
  for (std::uint64_t si = 0; si < n; ++si) {
    const State s = indexer.decode(si);
    const State cur_rep = rep_state(s, r.classes);
    const std::uint64_t cur_red = red_indexer.encode(to_reduced_state(r, cur_rep));
    const auto& orbit = red_orbits[static_cast<std::size_t>(orbit_of[cur_red])];
    const double proposal = 1.0 / static_cast<double>(orbit.size());
    const double c_cur = static_cast<double>(suborbit_size(cur_rep, r.classes));
    const std::vector<std::uint64_t> cur_sub = suborbit_indices(r, indexer, cur_rep);
    double reject_mass = 0.0;
    for (std::uint64_t u_red : orbit) {
      const State u_rep = from_reduced_state(r, red_indexer.decode(u_red));
      if (u_rep == cur_rep) {
        for (std::uint64_t t : cur_sub) k[si * n + t] += proposal / c_cur;
        continue;
      }
      const double c_new = static_cast<double>(suborbit_size(u_rep, r.classes));
      const double a = std::min(1.0, c_new / c_cur);
      if (a > 0.0)
        for (std::uint64_t t : suborbit_indices(r, indexer, u_rep)) k[si * n + t] += proposal * a / c_new;
      reject_mass += proposal * (1.0 - a);
    }
    if (reject_mass > 0.0)
      for (std::uint64_t t : cur_sub) k[si * n + t] += reject_mass / c_cur;
  }
  return k;
}

inline std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b,
                                  std::uint64_t n) {
  std::vector<double> out(n * n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (std::uint64_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
    }
  return out;
}

}  // namespace detail

inline ExplicitKernel explicit_kernel(const GraphicalModel& g, const ChainConfig& cfg,
                                      const SymmetryInputs& inputs = {},
                                      std::uint64_t cap = kKernelStateCap) {
  ChainConfig check = cfg;
  if (check.steps == 0) check.steps = 1;  // the kernel is one step by definition
  validate_config(check, inputs);
  StateIndexer indexer(g, cap);
  const std::uint64_t n = indexer.size();
  GibbsSampler gibbs(g, cfg.hard_weight);
  std::vector<double> k = detail::gibbs_kernel_matrix(g, gibbs, indexer);

  const VVLayout layout = VVLayout::of(g);
  if (cfg.algorithm == Algorithm::orbital || cfg.algorithm == Algorithm::vv_orbital) {
    std::vector<VVPermutation> action;
    if (cfg.algorithm == Algorithm::orbital) {
      for (const Permutation& theta : inputs.variable_group->generators)
        action.push_back(embed_variable_symmetry(g, theta));
    } else {
      action = *inputs.vv_group;
    }
    if (!action.empty()) {
      const auto orbits = detail::state_orbit_partition(layout, action, indexer);
      k = detail::matmul(k, detail::orbit_kernel_matrix(orbits, n), n);
    }
  } else if (cfg.algorithm == Algorithm::nec_orbital) {
    k = detail::matmul(k, detail::nec_kernel_matrix(*inputs.reduced, *inputs.reduced_group, indexer), n);
  }
  return ExplicitKernel{std::move(indexer), std::move(k), n};
}

// max_s |(pK)(s) - p(s)|
inline double stationarity_residual(const ExplicitKernel& kernel, const std::vector<double>& p) {
  double worst = 0.0;
  for (std::uint64_t t = 0; t < kernel.n; ++t) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < kernel.n; ++s) acc += p[s] * kernel.at(s, t);
    worst = std::max(worst, std::abs(acc - p[t]));
  }
  return worst;
}

}  // namespace pgmsym

#endif
