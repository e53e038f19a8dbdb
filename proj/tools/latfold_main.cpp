#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "latfold/encoded.hpp"
#include "latfold/lattice.hpp"
#include "latfold/nested_shell.hpp"
#include "latfold/polynomial.hpp"
#include "latfold/potentials.hpp"
#include "latfold/reduction.hpp"
#include "latfold/solve.hpp"
#include "latfold/turn_ancilla.hpp"
#include "latfold/turn_circuit.hpp"

using nlohmann::json;
using namespace latfold;

namespace {

struct JobConfig {
  std::string sequence;
  std::string lattice = "cubic";
  std::string encoding = "turn-ancilla";
  std::string potential = "hp";
  std::string hp_mapping;
  double lambda_back = 0.0, lambda_redun = 0.0, lambda_olap = 0.0;
  double lambda_one = 0.0, lambda_conn = 0.0;
  std::string solver = "exhaustive";
  std::string init = "random";
  int samples = 1000;
  std::uint64_t seed = 1;
  int sweeps = 64;
  double t_hot = 0.0, t_cold = 0.0;
  int split_k = 0;
  bool descent = false;
  int workers = 0;
  double t_sample_us = 20.0;
  std::string format = "text";
};

LatticeKind lattice_kind(const std::string& name) {
  if (name == "cubic") return LatticeKind::Cubic;
  if (name == "planar") return LatticeKind::Planar;
  throw FormatError("unknown lattice kind: " + name);
}

PotentialTable load_potential(const JobConfig& cfg) {
  if (cfg.potential == "hp") return PotentialTable::hp();
  if (cfg.potential == "mj" || cfg.potential.rfind("mj:", 0) == 0) {
    std::string path = cfg.potential == "mj" ? "" : cfg.potential.substr(3);
    if (path.empty()) {
      const char* env = std::getenv("LATFOLD_MJ_TABLE");
      if (!env || !*env) {
        throw FormatError(
            "MJ table path missing: use --potential mj:<file> or set "
            "LATFOLD_MJ_TABLE");
      }
      path = env;
    }
    return PotentialTable::load_mj_file(path);
  }
  throw FormatError("unknown potential spec: " + cfg.potential);
}

std::string effective_sequence(const JobConfig& cfg, const PotentialTable& table) {
  if (table.kind() == PotentialKind::HP && !cfg.hp_mapping.empty()) {
    std::ifstream is(cfg.hp_mapping);
    if (!is) throw FormatError("cannot open mapping file: " + cfg.hp_mapping);
    return map_to_hp(cfg.sequence, load_hp_mapping(is));
  }
  return cfg.sequence;
}

EncodedProblem build_problem(const JobConfig& cfg) {
  PotentialTable table = load_potential(cfg);
  std::string seq = effective_sequence(cfg, table);
  InteractionMatrix P = InteractionMatrix::build(seq, table);
  LatticeKind kind = lattice_kind(cfg.lattice);
  if (cfg.encoding == "turn-ancilla") {
    return turn_ancilla::encode(
        seq, P, kind, {cfg.lambda_back, cfg.lambda_redun, cfg.lambda_olap});
  }
  if (cfg.encoding == "turn-circuit") {
    return turn_circuit::encode(seq, P, kind, cfg.lambda_olap);
  }
  if (cfg.encoding == "nested-shell") {
    if (kind != LatticeKind::Cubic) {
      throw FormatError("the nested-shell encoding is defined on the cubic lattice");
    }
    return nested_shell::encode(seq, P,
                                {cfg.lambda_one, cfg.lambda_conn, cfg.lambda_olap});
  }
  throw FormatError("unknown encoding: " + cfg.encoding);
}

EncodedProblem load_problem_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open problem file: " + path);
  return EncodedProblem::load(is);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write file: " + path);
  os << content;
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> string_to_bits(const std::string& s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw FormatError("bit strings use 0/1 only");
    bits.push_back(c == '1');
  }
  return bits;
}

void apply_workers(int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

int run_encode(const JobConfig& cfg, const std::string& out) {
  EncodedProblem problem = build_problem(cfg);
  std::ostringstream os;
  problem.save(os);
  write_output(out, os.str());
  if (!out.empty() && out != "-") {
    std::cout << "encoded " << problem.sequence << ": " << problem.num_vars()
              << " variables, " << problem.hamiltonian.term_count()
              << " terms, max degree " << problem.metadata.at("max_degree")
              << "\n";
  }
  return 0;
}

int run_reduce(const std::string& in, const std::string& out) {
  EncodedProblem problem = load_problem_file(in);
  EncodedProblem reduced = reduction::reduce(problem);
  std::ostringstream os;
  reduced.save(os);
  write_output(out, os.str());
  if (!out.empty() && out != "-") {
    std::cout << "reduced to degree " << reduced.hamiltonian.degree() << " with "
              << reduced.reduction.gadgets.size() << " gadget(s), "
              << reduced.num_vars() << " variables\n";
  }
  return 0;
}

json sample_report(const EncodedProblem& problem,
                   const std::vector<solve::Sample>& samples, double best,
                   std::optional<double> ground, double t_sample_us) {
  json report;
  report["variables"] = problem.num_vars();
  report["samples"] = samples.size();
  report["min_energy"] = best;
  if (ground) {
    std::uint64_t hits = solve::count_hits(samples, *ground);
    auto stats = solve::compute_stats(hits, samples.size(), t_sample_us);
    report["ground_energy"] = *ground;
    report["stats"] = json::parse(solve::stats_json(stats));
  }
  return report;
}

int run_solve(const JobConfig& cfg, const std::string& in,
              const std::string& samples_out, std::optional<double> ground) {
  apply_workers(cfg.workers);
  EncodedProblem problem = load_problem_file(in);
  const auto num_vars = static_cast<std::uint32_t>(problem.num_vars());

  std::function<void(std::mt19937_64&, std::vector<std::uint8_t>&)> initializer;
  if (cfg.init == "valid-fold") {
    if (problem.encoder != "turn-ancilla") {
      throw FormatError("--init valid-fold applies to turn-ancilla problems");
    }
    PotentialTable table = load_potential(cfg);
    InteractionMatrix P = InteractionMatrix::build(problem.sequence, table);
    auto layout = turn_ancilla::make_layout(
        static_cast<int>(problem.sequence.size()), P, problem.lattice);
    initializer = turn_ancilla::valid_fold_initializer(layout, P,
                                                       problem.sequence,
                                                       cfg.split_k);
  }

  auto pieces = solve::split_subproblems(problem.hamiltonian, cfg.split_k);

  std::vector<solve::Sample> all_samples;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_bits;

  for (const auto& piece : pieces) {
    std::vector<VarIndex> free_vars;
    for (VarIndex v = cfg.split_k; v < num_vars; ++v) free_vars.push_back(v);
    std::vector<std::uint8_t> base(num_vars, 0);
    for (int r = 0; r < cfg.split_k; ++r) base[r] = piece.prefix[r];
    solve::CompiledProblem cp = solve::CompiledProblem::build(piece.poly, num_vars);

    if (cfg.solver == "exhaustive") {
      auto result = solve::exhaustive_solve(cp, free_vars, base);
      for (const auto& bits : result.minimizers) {
        solve::Sample s;
        s.bits = bits;
        s.energy = result.min_energy;
        s.subproblem = piece.id;
        all_samples.push_back(std::move(s));
      }
      if (result.min_energy < best) {
        best = result.min_energy;
        best_bits = result.minimizers.front();
      }
    } else if (cfg.solver == "sa") {
      solve::SaOptions opts;
      opts.seed = cfg.seed + piece.id;
      opts.initializer = initializer;
      opts.schedule =
          solve::resolve_schedule(piece.poly, {cfg.t_hot, cfg.t_cold, cfg.sweeps});
      int per_piece =
          std::max(1, cfg.samples / static_cast<int>(pieces.size()));
      auto samples = solve::simulated_annealing(cp, free_vars, base, per_piece, opts);
      for (auto& s : samples) {
        if (cfg.descent) s = solve::single_flip_descent(cp, free_vars, std::move(s));
        s.subproblem = piece.id;
        if (s.energy < best) {
          best = s.energy;
          best_bits = s.bits;
        }
        all_samples.push_back(std::move(s));
      }
    } else {
      throw FormatError("unknown solver: " + cfg.solver);
    }
  }

  if (!samples_out.empty()) {
    std::ostringstream os;
    for (const auto& s : all_samples) {
      os << s.subproblem << ' ' << bits_to_string(s.bits) << ' ';
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", s.energy);
      os << buf << '\n';
    }
    write_output(samples_out, os.str());
  }

  json report = sample_report(problem, all_samples, best, ground, cfg.t_sample_us);
  auto decoded = problem.decode(best_bits);
  report["best_decodes_to_valid_fold"] = decoded.valid;
  if (cfg.format == "json") {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "variables " << report["variables"] << "\n";
    std::cout << "samples " << all_samples.size() << "\n";
    std::cout << "min_energy " << best << "\n";
    if (ground) {
      std::uint64_t hits = solve::count_hits(all_samples, *ground);
      std::cout << solve::stats_text(
          solve::compute_stats(hits, all_samples.size(), cfg.t_sample_us));
    }
    std::cout << "best_decodes_to_valid_fold "
              << (decoded.valid ? "yes" : "no") << "\n";
  }
  return 0;
}

int run_decode(const JobConfig& cfg, const std::string& in,
               const std::string& bits_arg, const std::string& samples_file) {
  EncodedProblem problem = load_problem_file(in);
  PotentialTable table = load_potential(cfg);
  InteractionMatrix P = InteractionMatrix::build(problem.sequence, table);

  std::vector<std::vector<std::uint8_t>> assignments;
  if (!bits_arg.empty()) {
    assignments.push_back(string_to_bits(bits_arg));
  } else if (!samples_file.empty()) {
    std::ifstream is(samples_file);
    if (!is) throw FormatError("cannot open samples file: " + samples_file);
    std::string line;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::string id, bits;
      if (ls >> id >> bits) assignments.push_back(string_to_bits(bits));
    }
  } else {
    throw FormatError("decode needs --bits or --samples");
  }

  for (const auto& bits : assignments) {
    DecodedFold decoded = problem.decode(bits);
    if (!decoded.valid) {
      if (cfg.format == "json") {
        json j = {{"valid", false}, {"reason", decoded.reason}};
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "invalid: " << decoded.reason << "\n";
      }
      continue;
    }
    if (cfg.format == "json") {
      std::cout << fold_record_json(*decoded.fold, P) << "\n";
    } else {
      std::cout << fold_record_text(*decoded.fold, P);
    }
  }
  return 0;
}

int run_verify(const JobConfig& cfg) {
  apply_workers(cfg.workers);
  PotentialTable table = load_potential(cfg);
  std::string seq = effective_sequence(cfg, table);
  InteractionMatrix P = InteractionMatrix::build(seq, table);
  LatticeKind kind = lattice_kind(cfg.lattice);

  SawResult oracle = saw_enumerate(seq, P, kind);

  EncodedProblem problem = build_problem(cfg);
  double encoder_min = 0.0;
  bool minimizers_match = true;
  std::size_t encoder_minimizers = 0;

  if (cfg.encoding == "nested-shell") {
    nested_shell::ShellSpace space =
        nested_shell::build_space(static_cast<int>(seq.size()));
    auto valid = nested_shell::enumerate_valid(space, P);
    encoder_min = valid.min_energy;
    encoder_minimizers = valid.minimizers.size();
    std::vector<std::vector<Vec3>> canon_a, canon_b;
    for (const auto& coords : valid.minimizers) {
      canon_a.push_back(canonical_coords(coords, kind));
    }
    for (const Fold& f : oracle.minimizers) {
      canon_b.push_back(canonical_coords(f.coords, kind));
    }
    auto dedup = [](std::vector<std::vector<Vec3>>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(canon_a);
    dedup(canon_b);
    minimizers_match = canon_a == canon_b;
  } else {
    if (problem.num_vars() > 30) {
      throw TooLargeError("exact verification needs at most 30 variables, got " +
                          std::to_string(problem.num_vars()));
    }
    auto result = solve::exhaustive_solve(
        problem.hamiltonian, static_cast<std::uint32_t>(problem.num_vars()));
    encoder_min = result.min_energy;
    encoder_minimizers = result.minimizers.size();
    std::vector<std::vector<Vec3>> decoded_folds;
    bool any_valid = false;
    for (const auto& bits : result.minimizers) {
      DecodedFold decoded = problem.decode(bits);
      if (!decoded.valid) {
        // the ancilla encoding penalizes every invalid decoding; the
        // circuit encoding can tie with undecodable strings
        if (cfg.encoding == "turn-ancilla") minimizers_match = false;
        continue;
      }
      any_valid = true;
      decoded_folds.push_back(decoded.fold->coords);
    }
    std::vector<std::vector<Vec3>> oracle_folds;
    for (const Fold& f : oracle.minimizers) oracle_folds.push_back(f.coords);
    auto dedup = [](std::vector<std::vector<Vec3>>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(decoded_folds);
    dedup(oracle_folds);
    if (!any_valid || decoded_folds != oracle_folds) minimizers_match = false;
  }

  bool energy_match = std::abs(encoder_min - oracle.min_energy) <= 1e-9;
  bool pass = energy_match && minimizers_match;

  if (cfg.format == "json") {
    json j;
    j["sequence"] = seq;
    j["encoding"] = cfg.encoding;
    j["oracle_min"] = oracle.min_energy;
    j["encoder_min"] = encoder_min;
    j["oracle_minimizers"] = oracle.minimizers.size();
    j["encoder_minimizers"] = encoder_minimizers;
    j["energy_match"] = energy_match;
    j["minimizers_match"] = minimizers_match;
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "sequence           " << seq << "\n";
    std::cout << "encoding           " << cfg.encoding << "\n";
    std::cout << "oracle minimum     " << oracle.min_energy << "  ("
              << oracle.minimizers.size() << " fold(s))\n";
    std::cout << "encoder minimum    " << encoder_min << "  ("
              << encoder_minimizers << " minimizer(s))\n";
    std::cout << "energy match       " << (energy_match ? "yes" : "NO") << "\n";
    std::cout << "minimizers match   " << (minimizers_match ? "yes" : "NO") << "\n";
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? 0 : 1;
}

int run_stats(std::uint64_t hits, std::uint64_t total, double t_sample_us,
              const std::string& format) {
  auto stats = solve::compute_stats(hits, total, t_sample_us);
  if (format == "json") {
    std::cout << solve::stats_json(stats) << "\n";
  } else {
    std::cout << solve::stats_text(stats);
  }
  return 0;
}

int run_render(const JobConfig& cfg, const std::string& in,
               const std::string& out, std::size_t index) {
  std::ifstream is(in);
  if (!is) throw FormatError("cannot open fold file: " + in);
  auto folds = parse_fold_records(is);
  if (folds.empty()) throw FormatError("no fold records in " + in);
  if (index >= folds.size()) throw FormatError("fold index out of range");
  PotentialTable table = load_potential(cfg);
  InteractionMatrix P = InteractionMatrix::build(folds[index].sequence, table);
  write_output(out, fold_svg(folds[index], P));
  if (!out.empty() && out != "-") std::cout << fold_record_text(folds[index], P);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice protein folding compiler and solver toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a config file");

  JobConfig cfg;
  std::string in, out, samples_out, bits_arg, samples_file;
  std::optional<double> ground;
  std::uint64_t hits = 0, total = 0;
  std::size_t render_index = 0;

  auto add_job_flags = [&cfg](CLI::App* cmd, bool with_lambdas) {
    cmd->add_option("--lattice", cfg.lattice)
        ->check(CLI::IsMember({"cubic", "planar"}));
    cmd->add_option("--encoding", cfg.encoding)
        ->check(CLI::IsMember({"turn-ancilla", "turn-circuit", "nested-shell"}));
    cmd->add_option("--potential", cfg.potential,
                    "hp, mj or mj:<table file>");
    cmd->add_option("--hp-mapping", cfg.hp_mapping,
                    "residue-to-{H,P} mapping file");
    if (with_lambdas) {
      cmd->add_option("--lambda-back", cfg.lambda_back);
      cmd->add_option("--lambda-redun", cfg.lambda_redun);
      cmd->add_option("--lambda-olap", cfg.lambda_olap);
      cmd->add_option("--lambda-one", cfg.lambda_one);
      cmd->add_option("--lambda-conn", cfg.lambda_conn);
    }
  };

  CLI::App* encode = app.add_subcommand("encode", "compile a sequence to a problem file");
  encode->add_option("--sequence", cfg.sequence)->required();
  add_job_flags(encode, true);
  encode->add_option("--out", out);

  CLI::App* reduce = app.add_subcommand("reduce", "convert a problem to 2-local form");
  reduce->add_option("--in", in)->required();
  reduce->add_option("--out", out);

  CLI::App* solve_cmd = app.add_subcommand("solve", "search for low-energy assignments");
  solve_cmd->add_option("--in", in)->required();
  solve_cmd->add_option("--solver", cfg.solver)
      ->check(CLI::IsMember({"exhaustive", "sa"}));
  solve_cmd->add_option("--samples", cfg.samples);
  solve_cmd->add_option("--seed", cfg.seed);
  solve_cmd->add_option("--sweeps", cfg.sweeps);
  solve_cmd->add_option("--t-hot", cfg.t_hot);
  solve_cmd->add_option("--t-cold", cfg.t_cold);
  solve_cmd->add_option("--split-k", cfg.split_k);
  solve_cmd->add_option("--init", cfg.init,
                        "restart distribution: random or valid-fold")
      ->check(CLI::IsMember({"random", "valid-fold"}));
  solve_cmd->add_option("--potential", cfg.potential,
                        "needed by --init valid-fold");
  solve_cmd->add_flag("--descent", cfg.descent, "single-flip descent postprocessing");
  solve_cmd->add_option("--workers", cfg.workers);
  solve_cmd->add_option("--ground-energy", ground);
  solve_cmd->add_option("--t-sample-us", cfg.t_sample_us);
  solve_cmd->add_option("--samples-out", samples_out);
  solve_cmd->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));

  CLI::App* decode = app.add_subcommand("decode", "turn assignments back into folds");
  decode->add_option("--in", in)->required();
  decode->add_option("--bits", bits_arg);
  decode->add_option("--samples", samples_file);
  decode->add_option("--potential", cfg.potential);
  decode->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));

  CLI::App* verify = app.add_subcommand(
      "verify", "compare an encoding against the exact enumeration oracle");
  verify->add_option("--sequence", cfg.sequence)->required();
  add_job_flags(verify, true);
  verify->add_option("--workers", cfg.workers);
  verify->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));

  CLI::App* stats = app.add_subcommand("stats", "success statistics from hit counts");
  stats->add_option("--hits", hits)->required();
  stats->add_option("--total", total)->required();
  stats->add_option("--t-sample-us", cfg.t_sample_us);
  stats->add_option("--format", cfg.format)->check(CLI::IsMember({"text", "json"}));

  CLI::App* render = app.add_subcommand("render", "SVG projection of a fold record");
  render->add_option("--in", in)->required();
  render->add_option("--out", out);
  render->add_option("--index", render_index);
  render->add_option("--potential", cfg.potential);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err = {{"error", "invalid-arguments"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  try {
    if (encode->parsed()) return run_encode(cfg, out);
    if (reduce->parsed()) return run_reduce(in, out);
    if (solve_cmd->parsed()) return run_solve(cfg, in, samples_out, ground);
    if (decode->parsed()) return run_decode(cfg, in, bits_arg, samples_file);
    if (verify->parsed()) return run_verify(cfg);
    if (stats->parsed()) return run_stats(hits, total, cfg.t_sample_us, cfg.format);
    if (render->parsed()) return run_render(cfg, in, out, render_index);
  } catch (const Error& e) {
    json err = {{"error", "invalid-input"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}
