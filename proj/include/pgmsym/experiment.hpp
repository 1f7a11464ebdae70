#ifndef PGMSYM_EXPERIMENT_HPP
#define PGMSYM_EXPERIMENT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pgmsym/autograph.hpp"
#include "pgmsym/errors.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/reduction.hpp"
#include "pgmsym/samplers.hpp"

namespace pgmsym {

using MarginalTable = std::vector<std::vector<double>>;

inline constexpr double kKlSmoothing = 1e-6;

// Fixed 6-significant-digit formatting so reruns emit identical bytes.
inline std::string format_g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Sum over variables of KL(truth row || estimate row). Estimates are smoothed
// and renormalized per variable, so the result is finite and non-negative.
inline double kl_divergence(const MarginalTable& truth, const MarginalTable& estimate,
                            double eps = kKlSmoothing) {
  if (truth.size() != estimate.size()) throw SizeMismatch("marginal tables differ in variable count");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != estimate[i].size()) throw SizeMismatch("marginal tables differ in domain size");
    const double card = static_cast<double>(truth[i].size());
    for (std::size_t v = 0; v < truth[i].size(); ++v) {
      const double p = truth[i][v];
      if (p <= 0.0) continue;
      const double q = (estimate[i][v] + eps) / (1.0 + card * eps);
      total += p * std::log(p / q);
    }
  }
  return total;
}

struct ExperimentSpec {
  std::vector<Algorithm> algorithms;
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t snapshot_every = 1000;

  enum class Truth { exact, long_gibbs };
  Truth truth = Truth::exact;
  std::uint64_t truth_steps = 0;       // long_gibbs only
  std::uint64_t truth_seed = 0xC0FFEE;

  double hard_weight = kDefaultHardWeight;
  OrbitStrategy orbit_strategy = OrbitStrategy::exact_bfs;
  std::uint64_t orbit_cap = kDefaultOrbitCap;
  std::uint64_t state_cap = kDefaultStateCap;
  std::string out_dir;  // empty: keep results in memory only
};

// Reference marginals the KL curves are measured against. Chains sample the
// softened model, so the exact reference softens hard features the same way.
inline MarginalTable truth_marginals(const GraphicalModel& g, const ExperimentSpec& spec) {
  if (spec.truth == ExperimentSpec::Truth::exact)
    return exact_marginals(g, HardPolicy::soft(spec.hard_weight), spec.state_cap);
  if (spec.truth_steps == 0) throw ConfigError("long-gibbs truth needs a step count");
  ChainConfig cfg;
  cfg.algorithm = Algorithm::gibbs;
  cfg.steps = spec.truth_steps;
  cfg.seed = spec.truth_seed;
  cfg.hard_weight = spec.hard_weight;
  return run_chain(g, cfg).marginals;
}

struct RunOutput {
  Algorithm algo = Algorithm::gibbs;
  std::uint64_t seed = 0;
  std::vector<Snapshot> snapshots;
  std::vector<double> kl;  // one per snapshot
};

struct ExperimentResult {
  MarginalTable truth;
  std::vector<RunOutput> runs;
};

// First snapshot step at which the KL curve dips to the threshold.
inline std::optional<std::uint64_t> steps_to_threshold(const RunOutput& run, double threshold) {
  for (std::size_t k = 0; k < run.kl.size(); ++k)
    if (run.kl[k] <= threshold) return run.snapshots[k].step;
  return std::nullopt;
}

inline void write_snapshot_csv(std::ostream& out, const GraphicalModel& g, const RunOutput& run) {
  out << "step,wall_ms,var,value,estimate\n";
  for (const Snapshot& shot : run.snapshots)
    for (int i = 0; i < g.var_count(); ++i)
      for (int v = 0; v < g.cardinality(i); ++v)
        out << shot.step << "," << format_g6(shot.wall_ms) << ","
            << g.variables[static_cast<std::size_t>(i)].name << "," << v << ","
            << format_g6(shot.marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)]) << "\n";
}

inline void write_kl_csv(std::ostream& out, const ExperimentResult& result) {
  out << "algo,seed,step,wall_ms,kl\n";
  for (const RunOutput& run : result.runs)
    for (std::size_t k = 0; k < run.snapshots.size(); ++k)
      out << algorithm_name(run.algo) << "," << run.seed << "," << run.snapshots[k].step << ","
          << format_g6(run.snapshots[k].wall_ms) << "," << format_g6(run.kl[k]) << "\n";
}

inline void write_marginals_csv(std::ostream& out, const GraphicalModel& g, const MarginalTable& m) {
  out << "var,value,probability\n";
  for (int i = 0; i < g.var_count(); ++i)
    for (int v = 0; v < g.cardinality(i); ++v)
      out << g.variables[static_cast<std::size_t>(i)].name << "," << v << ","
          << format_g6(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)]) << "\n";
}

// Runs every (algorithm, seed) pair against a common truth; symmetry artifacts
// are computed once and shared read-only. Pairs run concurrently, each chain
// owning its generator state.
inline ExperimentResult run_experiment(const GraphicalModel& g, const ExperimentSpec& spec) {
  if (spec.algorithms.empty()) throw ConfigError("no algorithms requested");
  if (spec.seeds.empty()) throw ConfigError("no seeds requested");
  if (spec.steps == 0) throw ConfigError("steps must be positive");

  ExperimentResult result;
  result.truth = truth_marginals(g, spec);

  bool need_variable = false, need_vv = false, need_nec = false;
  for (Algorithm a : spec.algorithms) {
    need_variable |= a == Algorithm::orbital;
    need_vv |= a == Algorithm::vv_orbital;
    need_nec |= a == Algorithm::nec_orbital;
  }
  GeneratorSet variable_group;
  std::vector<VVPermutation> vv_group;
  std::optional<ReducedModel> reduced;
  std::vector<VVPermutation> reduced_group;
  if (need_variable) variable_group = variable_symmetry_generators(g);
  if (need_vv) vv_group = vv_symmetry_generators(g);
  if (need_nec) {
    reduced = reduce_model(g, value_swap_classes(g));
    reduced_group = reduced_vv_symmetries(*reduced);
  }
  SymmetryInputs inputs;
  inputs.variable_group = &variable_group;
  inputs.vv_group = &vv_group;
  if (reduced) {
    inputs.reduced = &*reduced;
    inputs.reduced_group = &reduced_group;
  }

  std::vector<std::future<RunOutput>> futures;
  for (Algorithm algo : spec.algorithms)
    for (std::uint64_t seed : spec.seeds)
      futures.push_back(std::async(std::launch::async, [&, algo, seed] {
        ChainConfig cfg;
        cfg.algorithm = algo;
        cfg.steps = spec.steps;
        cfg.seed = seed;
        cfg.snapshot_every = spec.snapshot_every;
        cfg.hard_weight = spec.hard_weight;
        cfg.orbit_strategy = spec.orbit_strategy;
        cfg.orbit_cap = spec.orbit_cap;
        RunOutput run;
        run.algo = algo;
        run.seed = seed;
        ChainResult chain = run_chain(g, cfg, inputs);
        run.snapshots = std::move(chain.snapshots);
        run.kl.reserve(run.snapshots.size());
        for (const Snapshot& shot : run.snapshots) run.kl.push_back(kl_divergence(result.truth, shot.marginals));
        return run;
      }));
  for (auto& f : futures) result.runs.push_back(f.get());

  if (!spec.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    for (const RunOutput& run : result.runs) {
      const fs::path path = fs::path(spec.out_dir) /
                            (algorithm_name(run.algo) + "-seed" + std::to_string(run.seed) + ".csv");
      std::ofstream out(path);
      if (!out) throw ValidationError("cannot write " + path.string());
      write_snapshot_csv(out, g, run);
    }
    std::ofstream kl(fs::path(spec.out_dir) / "kl.csv");
    if (!kl) throw ValidationError("cannot write kl.csv");
    write_kl_csv(kl, result);
  }
  return result;
}

}  // namespace pgmsym

#endif
