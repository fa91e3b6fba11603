#pragma once

// Campaign orchestration, state files, and report generation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sympt/classify.hpp"
#include "sympt/extremal.hpp"
#include "sympt/spectra.hpp"
#include "sympt/symcore.hpp"

namespace sympt {

namespace fs = std::filesystem;

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed state file; the message names the line or field at fault.
class parse_error : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

// ---------------------------------------------------------------------------
// State files

inline constexpr const char* kStateFormat = "sympt-state-v1";

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace detail

struct StateFile {
  int n_qubits = 0;
  double rank_tol = kDefaultRankTol;
  CMatrix matrix;
};

/// Serializes with 17 significant digits, one matrix row per line.
inline std::string format_state(int n, const CMatrix& m, double rank_tol) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format\": \"" << kStateFormat << "\",\n";
  os << "  \"n_qubits\": " << n << ",\n";
  os << "  \"rank_tol\": " << detail::fmt17(rank_tol) << ",\n";
  os << "  \"matrix\": [";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i ? ",\n    " : "\n    ");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << '[' << detail::fmt17(m(i, j).real()) << ", " << detail::fmt17(m(i, j).imag()) << ']';
    }
  }
  os << "\n  ]\n}\n";
  return os.str();
}

inline std::string format_state(const SymmetricState& s, double rank_tol) {
  return format_state(s.n_qubits(), s.matrix(), rank_tol);
}

/// Parses the text of a state file without validating the density-matrix invariants.
inline StateFile parse_state(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("line " + std::to_string(detail::line_of_offset(text, e.byte ? e.byte - 1 : 0)) +
                      ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw parse_error("top level: expected a JSON object");
  auto field = [&](const char* name) -> const nlohmann::json& {
    if (!j.contains(name)) throw parse_error(std::string("field '") + name + "': missing");
    return j.at(name);
  };
  const auto& format = field("format");
  if (!format.is_string() || format.get<std::string>() != kStateFormat)
    throw parse_error(std::string("field 'format': expected \"") + kStateFormat + "\"");
  const auto& nq = field("n_qubits");
  if (!nq.is_number_integer() || nq.get<long long>() < 1 || nq.get<long long>() > kMaxQubits)
    throw parse_error("field 'n_qubits': expected an integer in [1, 30]");

  StateFile out;
  out.n_qubits = nq.get<int>();
  if (j.contains("rank_tol")) {
    const auto& t = j.at("rank_tol");
    if (!t.is_number() || !(t.get<double>() > 0)) throw parse_error("field 'rank_tol': expected a positive number");
    out.rank_tol = t.get<double>();
  }
  const auto& mat = field("matrix");
  const int d = out.n_qubits + 1;
  if (!mat.is_array()) throw parse_error("field 'matrix': expected an array");
  // accept both the nested row layout and a flat row-major list of pairs
  std::vector<const nlohmann::json*> entries;
  if (mat.size() == static_cast<std::size_t>(d) && !mat.empty() && mat[0].is_array() && !mat[0].empty() &&
      mat[0][0].is_array()) {
    for (std::size_t r = 0; r < mat.size(); ++r) {
      if (!mat[r].is_array() || mat[r].size() != static_cast<std::size_t>(d))
        throw parse_error("field 'matrix' row " + std::to_string(r) + ": expected " + std::to_string(d) + " entries");
      for (const auto& e : mat[r]) entries.push_back(&e);
    }
  } else {
    for (const auto& e : mat) entries.push_back(&e);
  }
  if (entries.size() != static_cast<std::size_t>(d) * d)
    throw parse_error("field 'matrix': expected " + std::to_string(d * d) + " [re, im] entries, found " +
                      std::to_string(entries.size()));
  out.matrix.resize(d, d);
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    const auto& e = *entries[idx];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw parse_error("field 'matrix' entry " + std::to_string(idx) + " (row " + std::to_string(idx / d) +
                        ", col " + std::to_string(idx % d) + "): expected [re, im]");
    out.matrix(static_cast<Eigen::Index>(idx / d), static_cast<Eigen::Index>(idx % d)) =
        cplx{e[0].get<double>(), e[1].get<double>()};
  }
  return out;
}

inline StateFile read_state_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_state(ss.str());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
  if (!out) throw io_error("write failed for " + path.string());
}

inline void write_state_file(const fs::path& path, const SymmetricState& s, double rank_tol) {
  write_text(path, format_state(s, rank_tol));
}

/// Loads and validates a state file.
inline SymmetricState load_state(const fs::path& path, double* rank_tol = nullptr) {
  const StateFile f = read_state_file(path);
  if (rank_tol) *rank_tol = f.rank_tol;
  return SymmetricState::from_matrix(f.n_qubits, f.matrix);
}

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignConfig {
  int n_qubits = 4;
  int runs = 100;
  std::uint64_t seed = 1;
  double rank_tol = kDefaultRankTol;
  std::optional<RankProfile> target_profile;
  fs::path output_dir;  // empty: nothing persisted
  int parallelism = 1;
  bool keep_trajectories = false;

  void validate() const {
    if (runs < 1) throw invalid_input("campaign: runs must be >= 1");
    if (n_qubits < 4 || n_qubits > kMaxQubits) throw invalid_input("campaign: n_qubits outside [4, 30]");
    if (!(rank_tol > 0)) throw invalid_input("campaign: rank tolerance must be positive");
    if (parallelism < 1) throw invalid_input("campaign: parallelism must be >= 1");
    if (target_profile) check_profile(*target_profile, n_qubits);
  }
};

struct RunRecord {
  int run_index = 0;
  std::uint64_t seed = 0;
  int n_steps = 0;
  RankProfile first_step_profile;
  RankProfile terminal_profile;
  bool extremal = false;
  bool entangled = false;
  Verdict verdict = Verdict::CandidateEntangled;
  double wall_ms = 0.0;
  double mean_step_ms = 0.0;
  int borderline = 0;
  bool aborted = false;
  std::string diagnostic;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<RunRecord> runs;
  std::map<RankProfile, int> profile_frequencies;  // terminal profiles
  std::map<RankProfile, int> entangled_profiles;
  std::map<RankProfile, int> first_step_profiles;
  double extremal_entangled_fraction = 0.0;
  int aborted = 0;
  int borderline_runs = 0;
  std::vector<SearchTrajectory> trajectories;  // when keep_trajectories is set
  std::vector<fs::path> saved_states;
};

inline std::string campaign_csv(const CampaignReport& r) {
  std::ostringstream os;
  os << "run_index,seed,n_steps,terminal_profile,extremal,verdict,wall_ms\n";
  for (const auto& run : r.runs) {
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.3f", run.wall_ms);
    os << run.run_index << ',' << run.seed << ',' << run.n_steps << ',' << run.terminal_profile.to_string() << ','
       << (run.extremal ? 1 : 0) << ',' << to_string(run.verdict) << ',' << ms << '\n';
  }
  return os.str();
}

inline nlohmann::json campaign_json(const CampaignReport& r) {
  using nlohmann::json;
  auto freq = [](const std::map<RankProfile, int>& m) {
    json o = json::object();
    for (const auto& [p, c] : m) o[p.to_string()] = c;
    return o;
  };
  json j;
  j["n_qubits"] = r.config.n_qubits;
  j["runs"] = r.config.runs;
  j["seed"] = r.config.seed;
  j["rank_tol"] = r.config.rank_tol;
  j["target_profile"] = r.config.target_profile ? json(r.config.target_profile->to_string()) : json(nullptr);
  j["extremal_entangled_fraction"] = r.extremal_entangled_fraction;
  j["aborted"] = r.aborted;
  j["borderline_runs"] = r.borderline_runs;
  j["profile_frequencies"] = freq(r.profile_frequencies);
  j["entangled_profiles"] = freq(r.entangled_profiles);
  j["first_step_profiles"] = freq(r.first_step_profiles);
  json runs = json::array();
  for (const auto& run : r.runs) {
    json o;
    o["run_index"] = run.run_index;
    o["seed"] = run.seed;
    o["n_steps"] = run.n_steps;
    o["terminal_profile"] = run.terminal_profile.to_string();
    o["extremal"] = run.extremal;
    o["entangled"] = run.entangled;
    o["verdict"] = to_string(run.verdict);
    o["wall_ms"] = run.wall_ms;
    o["mean_step_ms"] = run.mean_step_ms;
    o["borderline"] = run.borderline;
    if (run.aborted) o["diagnostic"] = run.diagnostic;
    runs.push_back(std::move(o));
  }
  j["per_run"] = std::move(runs);
  return j;
}

inline SearchOptions search_options(const CampaignConfig& cfg) {
  SearchOptions opt;
  opt.rank_tol = cfg.rank_tol;
  if (cfg.target_profile) opt.accept = target_floor(*cfg.target_profile);
  return opt;
}

/// Runs `cfg.runs` independent searches from the maximally mixed state.
///
/// Run i uses seed run_seed(cfg.seed, i), so results do not depend on the
/// number of worker threads.
inline CampaignReport run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  fs::path state_dir;
  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    state_dir = cfg.output_dir / "states";
    fs::create_directories(state_dir, ec);
    const fs::path probe = cfg.output_dir / ".write-probe";
    {
      std::ofstream p(probe);
      if (!p) throw io_error("output directory is not writable: " + cfg.output_dir.string());
    }
    fs::remove(probe, ec);
  }

  const SearchOptions opt = search_options(cfg);
  std::vector<RunRecord> records(cfg.runs);
  std::vector<SearchTrajectory> trajectories(cfg.runs);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.runs) return;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t seed = run_seed(cfg.seed, static_cast<std::uint64_t>(i));
        SearchTrajectory tr = run_to_extremal(cfg.n_qubits, seed, opt);
        RunRecord rec;
        rec.run_index = i;
        rec.seed = seed;
        rec.n_steps = static_cast<int>(tr.steps.size());
        if (!tr.steps.empty()) rec.first_step_profile = tr.steps.front().profile;
        rec.terminal_profile = tr.terminal_profile;
        rec.extremal = tr.terminal_extremal;
        rec.entangled = tr.entangled();
        rec.verdict = tr.terminal_classification.verdict;
        rec.mean_step_ms = tr.mean_step_ms();
        rec.borderline = tr.terminal_borderline;
        rec.aborted = tr.aborted;
        rec.diagnostic = tr.diagnostic;
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        records[i] = std::move(rec);
        trajectories[i] = std::move(tr);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int jobs = std::min(cfg.parallelism, cfg.runs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  CampaignReport rep;
  rep.config = cfg;
  int entangled = 0;
  for (int i = 0; i < cfg.runs; ++i) {
    const RunRecord& rec = records[i];
    ++rep.profile_frequencies[rec.terminal_profile];
    if (!rec.first_step_profile.ranks.empty()) ++rep.first_step_profiles[rec.first_step_profile];
    if (rec.entangled) {
      ++entangled;
      ++rep.entangled_profiles[rec.terminal_profile];
    }
    rep.aborted += rec.aborted;
    rep.borderline_runs += rec.borderline > 0;
  }
  rep.extremal_entangled_fraction = static_cast<double>(entangled) / cfg.runs;
  rep.runs = std::move(records);

  if (!cfg.output_dir.empty()) {
    for (int i = 0; i < cfg.runs; ++i) {
      if (!rep.runs[i].entangled) continue;
      char name[64];
      std::snprintf(name, sizeof name, "run_%06d_%s.json", i, rep.runs[i].terminal_profile.to_string().c_str());
      const fs::path p = state_dir / name;
      write_text(p, format_state(cfg.n_qubits, trajectories[i].terminal, cfg.rank_tol));
      rep.saved_states.push_back(p);
    }
    write_text(cfg.output_dir / "runs.csv", campaign_csv(rep));
    write_text(cfg.output_dir / "report.json", campaign_json(rep).dump(2) + "\n");
  }
  if (cfg.keep_trajectories) rep.trajectories = std::move(trajectories);
  return rep;
}

// ---------------------------------------------------------------------------
// Single-state classification

enum ExitCode : int { kExitSeparable = 0, kExitEntangled = 1, kExitGeneric = 2, kExitParse = 64 };

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Separable: return kExitSeparable;
    case Verdict::CandidateEntangled: return kExitEntangled;
    case Verdict::GenericallySeparable: return kExitGeneric;
  }
  return kExitEntangled;
}

inline std::string format_alpha(const ProductVector& e) {
  const auto a = e.alpha();
  if (!a) return "inf";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", a->real(), a->imag());
  return buf;
}

inline std::string assessment_text(const Assessment& a) {
  std::ostringstream os;
  os << "rank profile:   " << a.profile.to_string() << '\n';
  os << "ppt:            " << (a.ppt.ppt ? "yes" : "no");
  char buf[64];
  std::snprintf(buf, sizeof buf, " (min eigenvalue %.3e at k=%d)", a.ppt.min_eigenvalue, a.ppt.worst_k);
  os << buf << '\n';
  os << "verdict:        " << to_string(a.classification.verdict) << '\n';
  os << "rules:          ";
  for (std::size_t i = 0; i < a.classification.triggered_rules.size(); ++i)
    os << (i ? ", " : "") << a.classification.triggered_rules[i];
  if (a.classification.triggered_rules.empty()) os << "none";
  os << '\n';
  if (!a.ppt.ppt) return os.str();
  std::snprintf(buf, sizeof buf, "%.3e", a.edge.residual);
  os << "product vector: "
     << (a.edge.found_vector ? "alpha = " + format_alpha(*a.edge.found_vector) : std::string("none found")) << " (residual "
     << buf << ")\n";
  if (a.decomposition) {
    os << "decomposition:  " << (a.decomposition->success ? "success" : "failed") << ", " << a.decomposition->terms.size()
       << " terms";
    std::snprintf(buf, sizeof buf, "%.2e", a.decomposition->reconstruction_error);
    os << ", reconstruction error " << buf << '\n';
  }
  os << "schmidt bound:  " << (a.schmidt ? std::to_string(*a.schmidt) : std::string("none")) << '\n';
  os << "edge exclusion: " << to_string(a.edge_exclusion) << '\n';
  os << "extremality:    " << (a.extremality_excluded ? "excluded by rank count" : "not excluded") << '\n';
  return os.str();
}

inline nlohmann::json assessment_json(const Assessment& a) {
  using nlohmann::json;
  json j;
  j["rank_profile"] = a.profile.to_string();
  j["ppt"] = a.ppt.ppt;
  j["min_eigenvalue"] = a.ppt.min_eigenvalue;
  j["worst_k"] = a.ppt.worst_k;
  j["verdict"] = to_string(a.classification.verdict);
  j["triggered_rules"] = a.classification.triggered_rules;
  if (a.ppt.ppt) {
    j["product_vector"] = a.edge.found_vector ? json(format_alpha(*a.edge.found_vector)) : json(nullptr);
    j["product_residual"] = a.edge.residual;
    if (a.decomposition) {
      json d;
      d["success"] = a.decomposition->success;
      d["reconstruction_error"] = a.decomposition->reconstruction_error;
      json terms = json::array();
      for (const auto& t : a.decomposition->terms) terms.push_back({{"weight", t.weight}, {"alpha", format_alpha(t.vector)}});
      d["terms"] = std::move(terms);
      j["decomposition"] = std::move(d);
    }
    j["schmidt_bound"] = a.schmidt ? json(*a.schmidt) : json(nullptr);
    j["edge_exclusion"] = to_string(a.edge_exclusion);
    j["extremality_excluded"] = a.extremality_excluded;
  }
  return j;
}

struct ClassifyOutcome {
  int exit_code = kExitParse;
  std::optional<Assessment> assessment;
  std::string diagnostic;  // set when the file could not be used
};

/// Loads, validates, and classifies a state file; never throws for bad input.
inline ClassifyOutcome classify_file(const fs::path& path, std::optional<double> rank_tol = std::nullopt) {
  ClassifyOutcome out;
  try {
    double file_tol = kDefaultRankTol;
    const SymmetricState s = load_state(path, &file_tol);
    out.assessment = assess_state(s, rank_tol.value_or(file_tol));
    out.exit_code = exit_code(out.assessment->classification.verdict);
  } catch (const parse_error& e) {
    out.diagnostic = path.string() + ": " + e.what();
  } catch (const invalid_input& e) {
    out.diagnostic = path.string() + ": " + e.what();
  } catch (const io_error& e) {
    out.diagnostic = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rank tables

/// Extremal entangled profiles expected for each N.
inline std::vector<RankProfile> expected_extremal_profiles(int n) {
  if (n < 4 || n > kMaxQubits) throw invalid_input("expected_extremal_profiles: N outside [4, 30]");
  if (n == 4) return {RankProfile{5, 7, 8}};
  const RankProfile cap = max_rank_profile(n);
  const int last = cap.size() - 1;
  auto with = [&](int d_prev, int d_last) {
    RankProfile p = cap;
    p[last - 1] += d_prev;
    p[last] += d_last;
    return p;
  };
  if (n % 2) return {with(0, -2)};
  std::vector<RankProfile> out{with(-1, -2), with(-1, -3)};
  if (n >= 10) out.push_back(with(0, -4));
  return out;
}

/// Profiles with r(ρ) = N+1 excluded from extremality by the rank count.
inline std::vector<RankProfile> listed_excluded_profiles(int n) {
  switch (n) {
    case 4: return {{5, 7, 9}, {5, 8, 8}, {5, 8, 9}};
    case 5: return {{6, 9, 12}, {6, 10, 11}, {6, 10, 12}};
    case 6: return {{7, 10, 15, 16}, {7, 11, 15, 16}, {7, 12, 14, 16}, {7, 12, 15, 15}, {7, 12, 15, 16}};
    default: return {};
  }
}

/// All profiles (N+1, r_1, ..., r_M) with 1 <= r_k <= max_k satisfying the rank-count inequality.
inline std::vector<RankProfile> computed_excluded_profiles(int n) {
  const RankProfile cap = max_rank_profile(n);
  std::vector<RankProfile> out;
  RankProfile p = cap;
  for (int k = 1; k < p.size(); ++k) p[k] = 1;
  for (;;) {
    if (extremality_excluded(p, n)) out.push_back(p);
    int k = p.size() - 1;
    while (k >= 1 && p[k] == cap[k]) p[k--] = 1;
    if (k < 1) break;
    ++p[k];
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct RankTableRow {
  int n = 0;
  int runs = 0;
  int aborted = 0;
  std::map<RankProfile, int> observed;  // extremal entangled terminals
  std::vector<RankProfile> expected;
  bool observed_subset_of_expected = true;
  std::optional<bool> exclusion_table_matches;  // N in {4,5,6}
  bool observed_avoids_exclusions = true;
  double extremal_entangled_fraction = 0.0;
  double mean_step_ms = 0.0;

  bool ok() const {
    return observed_subset_of_expected && observed_avoids_exclusions && exclusion_table_matches.value_or(true);
  }
};

struct RankTable {
  std::vector<RankTableRow> rows;
  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const RankTableRow& r) { return r.ok(); });
  }
};

inline RankTable reproduce_rank_table(int max_n, int runs_per_n, std::uint64_t seed, int parallelism = 1,
                                      double rank_tol = kDefaultRankTol, int min_n = 4) {
  if (max_n < 4 || max_n > kMaxQubits) throw invalid_input("reproduce_rank_table: max_n outside [4, 30]");
  if (min_n < 4 || min_n > max_n) throw invalid_input("reproduce_rank_table: min_n outside [4, max_n]");
  RankTable table;
  for (int n = min_n; n <= max_n; ++n) {
    CampaignConfig cfg;
    cfg.n_qubits = n;
    cfg.runs = runs_per_n;
    cfg.seed = run_seed(seed, static_cast<std::uint64_t>(n));
    cfg.rank_tol = rank_tol;
    cfg.parallelism = parallelism;
    const CampaignReport rep = run_campaign(cfg);

    RankTableRow row;
    row.n = n;
    row.runs = runs_per_n;
    row.aborted = rep.aborted;
    row.observed = rep.entangled_profiles;
    row.expected = expected_extremal_profiles(n);
    row.extremal_entangled_fraction = rep.extremal_entangled_fraction;
    double total = 0.0;
    for (const auto& r : rep.runs) total += r.mean_step_ms;
    row.mean_step_ms = total / runs_per_n;
    const auto excluded = computed_excluded_profiles(n);
    for (const auto& [p, c] : row.observed) {
      if (std::find(row.expected.begin(), row.expected.end(), p) == row.expected.end())
        row.observed_subset_of_expected = false;
      if (std::binary_search(excluded.begin(), excluded.end(), p)) row.observed_avoids_exclusions = false;
    }
    if (n <= 6) {
      auto listed = listed_excluded_profiles(n);
      std::sort(listed.begin(), listed.end());
      row.exclusion_table_matches = listed == excluded;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string rank_table_text(const RankTable& t) {
  std::ostringstream os;
  for (const auto& r : t.rows) {
    os << "N=" << r.n << "  runs=" << r.runs;
    char buf[64];
    std::snprintf(buf, sizeof buf, "  entangled=%.3f  step=%.2fms", r.extremal_entangled_fraction, r.mean_step_ms);
    os << buf << "  " << (r.ok() ? "match" : "MISMATCH") << '\n';
    os << "  expected:";
    for (const auto& p : r.expected) os << ' ' << p.to_string(",");
    os << "\n  observed:";
    if (r.observed.empty()) os << " none";
    for (const auto& [p, c] : r.observed) {
      const bool listed = std::find(r.expected.begin(), r.expected.end(), p) != r.expected.end();
      os << ' ' << p.to_string(",") << " x" << c << (listed ? "" : " (unexpected)");
    }
    os << '\n';
    if (r.exclusion_table_matches)
      os << "  exclusion table: " << (*r.exclusion_table_matches ? "reproduced" : "DIFFERS") << '\n';
    if (r.aborted) os << "  aborted runs: " << r.aborted << '\n';
  }
  return os.str();
}

inline nlohmann::json rank_table_json(const RankTable& t) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o;
    o["n_qubits"] = r.n;
    o["runs"] = r.runs;
    o["aborted"] = r.aborted;
    o["extremal_entangled_fraction"] = r.extremal_entangled_fraction;
    o["mean_step_ms"] = r.mean_step_ms;
    json exp = json::array();
    for (const auto& p : r.expected) exp.push_back(p.to_string());
    o["expected"] = std::move(exp);
    json obs = json::object();
    for (const auto& [p, c] : r.observed) obs[p.to_string()] = c;
    o["observed"] = std::move(obs);
    o["observed_subset_of_expected"] = r.observed_subset_of_expected;
    o["observed_avoids_exclusions"] = r.observed_avoids_exclusions;
    o["exclusion_table_matches"] = r.exclusion_table_matches ? json(*r.exclusion_table_matches) : json(nullptr);
    o["match"] = r.ok();
    rows.push_back(std::move(o));
  }
  return json{{"rows", rows}, {"match", t.ok()}};
}

}  // namespace sympt
