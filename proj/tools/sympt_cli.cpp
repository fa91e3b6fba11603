#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "sympt/sympt.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

struct Common {
  int qubits = 4;
  int runs = 100;
  std::uint64_t seed = 1;
  double tol = 0.0;
  int jobs = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Campaign seed")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Relative rank tolerance (default 1e-8 or $SYMPT_DEFAULT_TOL)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory for reports and state files");
}

double effective_tol(const Common& c) { return c.tol > 0 ? c.tol : sympt::default_rank_tol(); }

int cmd_search(const Common& c, const std::string& target) {
  sympt::CampaignConfig cfg;
  cfg.n_qubits = c.qubits;
  cfg.runs = c.runs;
  cfg.seed = c.seed;
  cfg.rank_tol = effective_tol(c);
  cfg.parallelism = c.jobs;
  cfg.output_dir = c.out;
  if (!target.empty()) cfg.target_profile = sympt::RankProfile::parse(target);
  const auto rep = sympt::run_campaign(cfg);

  std::printf("N=%d runs=%d seed=%llu tol=%g\n", cfg.n_qubits, cfg.runs, static_cast<unsigned long long>(cfg.seed),
              cfg.rank_tol);
  std::printf("terminal profiles:\n");
  for (const auto& [p, n] : rep.profile_frequencies) std::printf("  %-24s %6d\n", p.to_string(",").c_str(), n);
  std::printf("first-step profiles:\n");
  for (const auto& [p, n] : rep.first_step_profiles) std::printf("  %-24s %6d\n", p.to_string(",").c_str(), n);
  std::printf("extremal entangled fraction: %.4f\n", rep.extremal_entangled_fraction);
  if (rep.aborted) std::printf("aborted runs: %d\n", rep.aborted);
  if (rep.borderline_runs) std::printf("runs with borderline rank decisions: %d\n", rep.borderline_runs);
  if (!cfg.output_dir.empty())
    std::printf("wrote %s (%zu state files)\n", cfg.output_dir.string().c_str(), rep.saved_states.size());
  return rep.aborted ? kExitSoftware : 0;
}

int cmd_classify(const std::string& path, double tol, bool json) {
  const auto out = sympt::classify_file(path, tol > 0 ? std::optional<double>(tol) : std::nullopt);
  if (!out.assessment) {
    std::cerr << "error: " << out.diagnostic << '\n';
    return out.exit_code;
  }
  if (json) std::cout << sympt::assessment_json(*out.assessment).dump(2) << '\n';
  else std::cout << sympt::assessment_text(*out.assessment);
  return out.exit_code;
}

int cmd_table(const Common& c, int min_qubits) {
  const auto table = sympt::reproduce_rank_table(c.qubits, c.runs, c.seed, c.jobs, effective_tol(c), min_qubits);
  std::cout << sympt::rank_table_text(table);
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    sympt::write_text(std::filesystem::path(c.out) / "table.json", sympt::rank_table_json(table).dump(2) + "\n");
  }
  return table.ok() ? 0 : 1;
}

int cmd_oracle(const Common& c) {
  bool ok = true;
  for (int n = 2; n <= c.qubits; ++n) {
    const auto r = sympt::oracle::check(n, c.runs, sympt::run_seed(c.seed, n), effective_tol(c));
    std::printf("N=%d states=%d max view error %.3e, profile mismatches %d  %s\n", n, r.states, r.max_view_error,
                r.profile_mismatches, r.passed() ? "ok" : "FAIL");
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank analysis and extremal search for permutation-symmetric PPT states"};
  app.require_subcommand(1);

  Common search, table, oracle;
  std::string target;
  auto* s = app.add_subcommand("search", "Run a campaign of extremal searches from the maximally mixed state");
  s->add_option("--qubits", search.qubits, "Number of qubits N")->required()->check(CLI::Range(4, 30));
  s->add_option("--runs", search.runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--target-ranks", target, "Rank floor a,b,c for targeted steps");
  add_common(s, search);

  std::string file;
  double classify_tol = 0.0;
  bool json = false;
  auto* c = app.add_subcommand("classify", "Classify a saved state file");
  c->add_option("file", file, "State file (sympt-state-v1)")->required();
  c->add_option("--tol", classify_tol, "Relative rank tolerance (default: the file's)")->check(CLI::PositiveNumber);
  c->add_flag("--json", json, "Print JSON instead of text");

  int min_qubits = 4;
  table.runs = 100;
  table.qubits = 8;
  auto* t = app.add_subcommand("table", "Reproduce the table of extremal entangled rank profiles");
  t->add_option("--qubits", table.qubits, "Largest N")->check(CLI::Range(4, 30))->capture_default_str();
  t->add_option("--min-qubits", min_qubits, "Smallest N")->check(CLI::Range(4, 30))->capture_default_str();
  t->add_option("--runs", table.runs, "Runs per N")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(t, table);

  oracle.qubits = 8;
  oracle.runs = 50;
  auto* o = app.add_subcommand("oracle-check", "Compare compressed views with the full 2^N computation");
  o->add_option("--qubits", oracle.qubits, "Largest N")->check(CLI::Range(2, 8))->capture_default_str();
  o->add_option("--runs", oracle.runs, "Random states per N")->check(CLI::PositiveNumber)->capture_default_str();
  o->add_option("--seed", oracle.seed, "Seed")->capture_default_str();
  o->add_option("--tol", oracle.tol, "Relative rank tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*s) return cmd_search(search, target);
    if (*c) return cmd_classify(file, classify_tol, json);
    if (*t) return cmd_table(table, min_qubits);
    if (*o) return cmd_oracle(oracle);
  } catch (const sympt::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const sympt::invalid_input& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSoftware;
  }
  return 0;
}
