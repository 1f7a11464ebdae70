// Command-line front end: symmetry reports, model reduction, sampling runs,
// exact references, KL experiments, benchmark model generators.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgmsym/autograph.hpp"
#include "pgmsym/domains.hpp"
#include "pgmsym/experiment.hpp"
#include "pgmsym/model.hpp"
#include "pgmsym/reduction.hpp"
#include "pgmsym/samplers.hpp"
#include "pgmsym/symmetry.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitResourceCap = 3;

pgmsym::GraphicalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pgmsym::ValidationError("cannot open model file '" + path + "'");
  return pgmsym::parse_model(in);
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw pgmsym::ValidationError("cannot write '" + out_path + "'");
  out << text;
}

std::vector<std::string> variable_labels(const pgmsym::GraphicalModel& g) {
  std::vector<std::string> labels;
  for (const auto& v : g.variables) labels.push_back(v.name);
  return labels;
}

std::string group_order_line(const pgmsym::GeneratorSet& gens, std::uint64_t cap) {
  try {
    return std::to_string(pgmsym::group_closure(gens, cap).size());
  } catch (const pgmsym::GroupTooLarge&) {
    return "> " + std::to_string(cap);
  }
}

std::string classes_sidecar(const pgmsym::GraphicalModel& g, const pgmsym::ValueClasses& classes) {
  std::ostringstream out;
  for (int i = 0; i < g.var_count(); ++i) {
    out << "var " << g.variables[static_cast<std::size_t>(i)].name << " classes [";
    const auto& per_var = classes.members[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < per_var.size(); ++c) {
      out << (c ? "," : "") << "[";
      for (std::size_t k = 0; k < per_var[c].size(); ++k) out << (k ? "," : "") << per_var[c][k];
      out << "]";
    }
    out << "]\n";
  }
  return out.str();
}

struct SymmetriesOptions {
  std::string model_path;
  std::string kind = "vv";
  std::string dump_graph_path;
  std::size_t budget = 1000000;
  std::uint64_t closure_cap = 100000;
  std::uint64_t state_cap = pgmsym::kDefaultStateCap;
  std::uint64_t renaming_cap = pgmsym::kDefaultRenamingCap;
};

void print_taxonomy(std::ostream& out, const pgmsym::GraphicalModel& g,
                    const std::vector<pgmsym::VVPermutation>& gens, std::uint64_t state_cap,
                    std::uint64_t renaming_cap) {
  try {
    const pgmsym::TaxonomyReport report = pgmsym::classify_taxonomy(g, gens, state_cap, renaming_cap);
    out << "taxonomy: " << pgmsym::taxonomy_label_name(report.group_label);
    if (report.witness) out << " (witness: " << pgmsym::renaming_to_string(g, *report.witness) << ")";
    out << "\n";
    for (std::size_t k = 0; k < report.per_generator.size(); ++k) {
      out << "  generator " << k + 1 << ": "
          << pgmsym::taxonomy_label_name(report.per_generator[k].label);
      if (report.per_generator[k].witness)
        out << " (witness: " << pgmsym::renaming_to_string(g, *report.per_generator[k].witness) << ")";
      out << "\n";
    }
  } catch (const pgmsym::ResourceCapError& e) {
    out << "taxonomy: skipped (" << e.what() << ")\n";
  }
}

int cmd_symmetries(const SymmetriesOptions& opt) {
  const pgmsym::GraphicalModel g = load_model(opt.model_path);
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out;
  const pgmsym::AutoSearchConfig cfg{opt.budget};

  if (opt.kind == "variable") {
    const pgmsym::ColoredGraph graph = pgmsym::build_variable_graph(g);
    if (!opt.dump_graph_path.empty()) {
      std::ostringstream dump;
      pgmsym::dump_graph(graph, dump);
      write_text(opt.dump_graph_path, dump.str());
    }
    const pgmsym::GeneratorSet gens = pgmsym::variable_symmetry_generators(g, cfg);
    out << "kind: variable\ngenerators: " << gens.generators.size() << "\n";
    for (const auto& p : gens.generators) out << "  " << pgmsym::cycle_notation(p, variable_labels(g)) << "\n";
    out << "group order: " << group_order_line(gens, opt.closure_cap) << "\n";
    std::vector<pgmsym::VVPermutation> embedded;
    for (const auto& theta : gens.generators) embedded.push_back(pgmsym::embed_variable_symmetry(g, theta));
    print_taxonomy(out, g, embedded, opt.state_cap, opt.renaming_cap);
  } else if (opt.kind == "vv") {
    const pgmsym::ColoredGraph graph = pgmsym::build_vv_graph(g);
    if (!opt.dump_graph_path.empty()) {
      std::ostringstream dump;
      pgmsym::dump_graph(graph, dump);
      write_text(opt.dump_graph_path, dump.str());
    }
    const auto gens = pgmsym::vv_symmetry_generators(g, cfg);
    const auto labels = pgmsym::VVLayout::of(g).labels(g);
    out << "kind: vv\ngenerators: " << gens.size() << "\n";
    for (const auto& phi : gens) out << "  " << pgmsym::cycle_notation(phi.perm(), labels) << "\n";
    pgmsym::GeneratorSet raw{pgmsym::VVLayout::of(g).total, {}};
    for (const auto& phi : gens) raw.generators.push_back(phi.perm());
    out << "group order: " << group_order_line(raw, opt.closure_cap) << "\n";
    print_taxonomy(out, g, gens, opt.state_cap, opt.renaming_cap);
  } else if (opt.kind == "nec") {
    const pgmsym::ValueClasses classes = pgmsym::value_swap_classes(g, cfg);
    const pgmsym::ReducedModel reduced = pgmsym::reduce_model(g, classes);
    const auto gens = pgmsym::reduced_vv_symmetries(reduced, cfg);
    out << "kind: nec\nvalue classes:\n" << classes_sidecar(g, classes);
    const auto labels = pgmsym::VVLayout::of(reduced.model).labels(reduced.model);
    out << "reduced generators: " << gens.size() << "\n";
    for (const auto& phi : gens) out << "  " << pgmsym::cycle_notation(phi.perm(), labels) << "\n";
    pgmsym::GeneratorSet raw{pgmsym::VVLayout::of(reduced.model).total, {}};
    for (const auto& phi : gens) raw.generators.push_back(phi.perm());
    out << "reduced group order: " << group_order_line(raw, opt.closure_cap) << "\n";
    bool merged_values = false;
    for (int i = 0; i < g.var_count(); ++i)
      if (classes.num_classes(i) < g.cardinality(i)) merged_values = true;
    if (merged_values) {
      // composites of value swaps and reduced-model symmetries relate
      // variables of different cardinalities
      out << "taxonomy: non_equicardinal\n";
    } else {
      print_taxonomy(out, reduced.model, gens, opt.state_cap, opt.renaming_cap);
    }
    try {
      out << "k: " << pgmsym::format_g6(pgmsym::k_ratio(g, reduced, opt.state_cap)) << "\n";
    } catch (const pgmsym::ResourceCapError&) {
      out << "k: skipped (state space over cap)\n";
    }
  } else {
    throw pgmsym::ValidationError("unknown kind '" + opt.kind + "' (variable|vv|nec)");
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out << "elapsed_ms: " << pgmsym::format_g6(ms) << "\n";
  std::cout << out.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetry-aware MCMC for discrete graphical models"};
  app.require_subcommand(1);

  // symmetries
  SymmetriesOptions sym;
  CLI::App* sym_cmd = app.add_subcommand("symmetries", "compute and print model symmetries");
  sym_cmd->add_option("model", sym.model_path, "model file")->required();
  sym_cmd->add_option("--kind", sym.kind, "variable|vv|nec (default vv)");
  sym_cmd->add_option("--dump-graph", sym.dump_graph_path, "write the colored graph in DIMACS-like text");
  sym_cmd->add_option("--budget", sym.budget, "search node budget");
  sym_cmd->add_option("--closure-cap", sym.closure_cap, "group order enumeration cap");

  // reduce
  std::string reduce_model_path, reduce_out;
  CLI::App* reduce_cmd = app.add_subcommand("reduce", "emit the value-reduced model plus classes");
  reduce_cmd->add_option("model", reduce_model_path, "model file")->required();
  reduce_cmd->add_option("--out", reduce_out, "output directory (default: stdout)");

  // sample
  std::string sample_model_path, sample_algo = "gibbs", sample_strategy = "exact-bfs", sample_out;
  pgmsym::ChainConfig sample_cfg;
  CLI::App* sample_cmd = app.add_subcommand("sample", "run one chain and emit snapshot CSV");
  sample_cmd->add_option("model", sample_model_path, "model file")->required();
  sample_cmd->add_option("--algo", sample_algo, "gibbs|orbital|vv-orbital|nec-orbital");
  sample_cmd->add_option("--steps", sample_cfg.steps, "chain length")->required();
  sample_cmd->add_option("--seed", sample_cfg.seed, "rng seed");
  sample_cmd->add_option("--snapshot-every", sample_cfg.snapshot_every, "snapshot interval in steps");
  sample_cmd->add_option("--burn-in", sample_cfg.burn_in, "steps discarded before tallying");
  sample_cmd->add_option("--orbit-strategy", sample_strategy, "exact-bfs|pra");
  sample_cmd->add_option("--hard-weight", sample_cfg.hard_weight, "finite stand-in for hard weights");
  sample_cmd->add_option("--orbit-cap", sample_cfg.orbit_cap, "orbit enumeration cap");
  sample_cmd->add_option("--out", sample_out, "CSV path (default: stdout)");

  // run
  std::string run_model_path, run_algos = "gibbs", run_seeds = "1", run_truth = "exact", run_out,
              run_strategy = "exact-bfs";
  pgmsym::ExperimentSpec run_spec;
  CLI::App* run_cmd = app.add_subcommand("run", "multi-algorithm KL experiment");
  run_cmd->add_option("model", run_model_path, "model file")->required();
  run_cmd->add_option("--algos", run_algos, "comma list of algorithms");
  run_cmd->add_option("--steps", run_spec.steps, "chain length")->required();
  run_cmd->add_option("--seeds", run_seeds, "comma list of seeds");
  run_cmd->add_option("--snapshot-every", run_spec.snapshot_every, "snapshot interval");
  run_cmd->add_option("--truth", run_truth, "exact|long-gibbs");
  run_cmd->add_option("--truth-steps", run_spec.truth_steps, "steps for long-gibbs truth");
  run_cmd->add_option("--truth-seed", run_spec.truth_seed, "seed for long-gibbs truth");
  run_cmd->add_option("--hard-weight", run_spec.hard_weight, "finite stand-in for hard weights");
  run_cmd->add_option("--orbit-strategy", run_strategy, "exact-bfs|pra");
  run_cmd->add_option("--out", run_out, "output directory")->required();

  // exact
  std::string exact_model_path, exact_out;
  std::uint64_t exact_cap = pgmsym::kDefaultStateCap;
  CLI::App* exact_cmd = app.add_subcommand("exact", "exact marginals by enumeration");
  exact_cmd->add_option("model", exact_model_path, "model file")->required();
  exact_cmd->add_option("--state-cap", exact_cap, "state space cap");
  exact_cmd->add_option("--out", exact_out, "CSV path (default: stdout)");

  // gen
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a benchmark model");
  gen_cmd->require_subcommand(1);
  std::string gen_out;
  pgmsym::RingSpec ring;
  CLI::App* gen_ring_cmd = gen_cmd->add_subcommand("ring", "alternating message-passing ring");
  gen_ring_cmd->add_option("--n", ring.n_people, "number of people (even)");
  gen_ring_cmd->add_option("--w1", ring.w_male, "male edge weight");
  gen_ring_cmd->add_option("--w2", ring.w_female, "female edge weight");
  gen_ring_cmd->add_option("--rename-prob", ring.rename_prob, "per-variable value renaming probability");
  gen_ring_cmd->add_option("--seed", ring.seed, "rng seed");
  gen_ring_cmd->add_option("--out", gen_out, "output path");

  pgmsym::CurriculumSpec curriculum;
  std::vector<int> cur_areas{2, 3};
  std::vector<double> cur_fail;
  std::uint64_t cur_seed = 0;
  CLI::App* gen_cur_cmd = gen_cmd->add_subcommand("curriculum", "student breadth requirements");
  gen_cur_cmd->add_option("--students", curriculum.n_students, "student count");
  gen_cur_cmd->add_option("--areas", cur_areas, "courses per area");
  gen_cur_cmd->add_option("--fail-weights", cur_fail, "per-student fail weights (default drawn from {0.5,1})");
  gen_cur_cmd->add_option("--completion-weight", curriculum.completion_weight, "completion bonus");
  gen_cur_cmd->add_option("--seed", cur_seed, "seed for default fail weights");
  gen_cur_cmd->add_option("--out", gen_out, "output path");

  double g1_w1 = std::log(2.0), g1_w2 = std::log(3.0);
  CLI::App* gen_g1_cmd = gen_cmd->add_subcommand("g1", "two-clause toy model");
  gen_g1_cmd->add_option("--w1", g1_w1, "first clause weight");
  gen_g1_cmd->add_option("--w2", g1_w2, "second clause weight");
  gen_g1_cmd->add_option("--out", gen_out, "output path");

  double g2_ws = 0.9, g2_wd = 0.4;
  CLI::App* gen_g2_cmd = gen_cmd->add_subcommand("g2", "four state-indicator features");
  gen_g2_cmd->add_option("--ws", g2_ws, "weight of agreeing states");
  gen_g2_cmd->add_option("--wd", g2_wd, "weight of disagreeing states");
  gen_g2_cmd->add_option("--out", gen_out, "output path");

  double g3_w = std::log(2.0);
  CLI::App* gen_g3_cmd = gen_cmd->add_subcommand("g3", "mixed-cardinality toy model");
  gen_g3_cmd->add_option("--w", g3_w, "feature weight");
  gen_g3_cmd->add_option("--out", gen_out, "output path");

  double xor_w = 0.8;
  CLI::App* gen_xor_cmd = gen_cmd->add_subcommand("xor", "exclusive-or toy model");
  gen_xor_cmd->add_option("--w", xor_w, "feature weight");
  gen_xor_cmd->add_option("--out", gen_out, "output path");

  // binarize
  std::string bin_model_path, bin_out;
  CLI::App* bin_cmd = app.add_subcommand("binarize", "one Boolean per value plus exactly-one constraints");
  bin_cmd->add_option("model", bin_model_path, "model file")->required();
  bin_cmd->add_option("--out", bin_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sym_cmd->parsed()) return cmd_symmetries(sym);

    if (reduce_cmd->parsed()) {
      const pgmsym::GraphicalModel g = load_model(reduce_model_path);
      const pgmsym::ValueClasses classes = pgmsym::value_swap_classes(g);
      const pgmsym::ReducedModel reduced = pgmsym::reduce_model(g, classes);
      if (reduce_out.empty()) {
        std::cout << pgmsym::serialize_model(reduced.model) << "---\n" << classes_sidecar(g, classes);
      } else {
        std::filesystem::create_directories(reduce_out);
        write_text(reduce_out + "/reduced.model", pgmsym::serialize_model(reduced.model));
        write_text(reduce_out + "/classes.txt", classes_sidecar(g, classes));
      }
      return kExitOk;
    }

    if (sample_cmd->parsed()) {
      const pgmsym::GraphicalModel g = load_model(sample_model_path);
      const auto algo = pgmsym::parse_algorithm(sample_algo);
      if (!algo) throw pgmsym::ConfigError("unknown algorithm '" + sample_algo + "'");
      sample_cfg.algorithm = *algo;
      if (sample_strategy == "pra")
        sample_cfg.orbit_strategy = pgmsym::OrbitStrategy::pra;
      else if (sample_strategy != "exact-bfs")
        throw pgmsym::ConfigError("unknown orbit strategy '" + sample_strategy + "'");

      pgmsym::GeneratorSet variable_group;
      std::vector<pgmsym::VVPermutation> vv_group;
      std::optional<pgmsym::ReducedModel> reduced;
      std::vector<pgmsym::VVPermutation> reduced_group;
      pgmsym::SymmetryInputs inputs;
      if (sample_cfg.algorithm == pgmsym::Algorithm::orbital) {
        variable_group = pgmsym::variable_symmetry_generators(g);
        inputs.variable_group = &variable_group;
      } else if (sample_cfg.algorithm == pgmsym::Algorithm::vv_orbital) {
        vv_group = pgmsym::vv_symmetry_generators(g);
        inputs.vv_group = &vv_group;
      } else if (sample_cfg.algorithm == pgmsym::Algorithm::nec_orbital) {
        reduced = pgmsym::reduce_model(g, pgmsym::value_swap_classes(g));
        reduced_group = pgmsym::reduced_vv_symmetries(*reduced);
        inputs.reduced = &*reduced;
        inputs.reduced_group = &reduced_group;
      }
      const pgmsym::ChainResult result = pgmsym::run_chain(g, sample_cfg, inputs);
      pgmsym::RunOutput run;
      run.algo = sample_cfg.algorithm;
      run.seed = sample_cfg.seed;
      run.snapshots = result.snapshots;
      std::ostringstream csv;
      pgmsym::write_snapshot_csv(csv, g, run);
      write_text(sample_out, csv.str());
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      const pgmsym::GraphicalModel g = load_model(run_model_path);
      std::stringstream algos(run_algos);
      std::string token;
      while (std::getline(algos, token, ',')) {
        const auto algo = pgmsym::parse_algorithm(token);
        if (!algo) throw pgmsym::ConfigError("unknown algorithm '" + token + "'");
        run_spec.algorithms.push_back(*algo);
      }
      std::stringstream seeds(run_seeds);
      while (std::getline(seeds, token, ',')) run_spec.seeds.push_back(std::stoull(token));
      if (run_truth == "exact")
        run_spec.truth = pgmsym::ExperimentSpec::Truth::exact;
      else if (run_truth == "long-gibbs")
        run_spec.truth = pgmsym::ExperimentSpec::Truth::long_gibbs;
      else
        throw pgmsym::ConfigError("unknown truth mode '" + run_truth + "'");
      if (run_strategy == "pra")
        run_spec.orbit_strategy = pgmsym::OrbitStrategy::pra;
      else if (run_strategy != "exact-bfs")
        throw pgmsym::ConfigError("unknown orbit strategy '" + run_strategy + "'");
      run_spec.out_dir = run_out;
      const pgmsym::ExperimentResult result = pgmsym::run_experiment(g, run_spec);
      std::cout << "wrote " << result.runs.size() << " runs to " << run_out << "\n";
      return kExitOk;
    }

    if (exact_cmd->parsed()) {
      const pgmsym::GraphicalModel g = load_model(exact_model_path);
      std::ostringstream csv;
      pgmsym::write_marginals_csv(csv, g, pgmsym::exact_marginals(g, pgmsym::HardPolicy::exact_infinity(), exact_cap));
      write_text(exact_out, csv.str());
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      pgmsym::GraphicalModel g;
      if (gen_ring_cmd->parsed()) {
        g = pgmsym::gen_ring(ring);
      } else if (gen_cur_cmd->parsed()) {
        if (cur_fail.empty()) {
          std::mt19937_64 rng(cur_seed);
          std::uniform_int_distribution<int> coin(0, 1);
          for (int s = 0; s < curriculum.n_students; ++s) cur_fail.push_back(coin(rng) ? 1.0 : 0.5);
        }
        curriculum.areas = cur_areas;
        curriculum.fail_weights = cur_fail;
        g = pgmsym::gen_curriculum(curriculum);
      } else if (gen_g1_cmd->parsed()) {
        g = pgmsym::toy_g1(g1_w1, g1_w2);
      } else if (gen_g2_cmd->parsed()) {
        g = pgmsym::toy_g2(g2_ws, g2_wd);
      } else if (gen_g3_cmd->parsed()) {
        g = pgmsym::toy_g3_nec(g3_w);
      } else if (gen_xor_cmd->parsed()) {
        g = pgmsym::toy_xor(xor_w);
      }
      write_text(gen_out, pgmsym::serialize_model(g));
      return kExitOk;
    }

    if (bin_cmd->parsed()) {
      const pgmsym::GraphicalModel g = load_model(bin_model_path);
      write_text(bin_out, pgmsym::serialize_model(pgmsym::binarize(g).model));
      return kExitOk;
    }
  } catch (const pgmsym::ResourceCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const pgmsym::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
