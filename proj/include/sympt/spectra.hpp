#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <compare>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sympt/symcore.hpp"

namespace sympt {

inline constexpr double kDefaultRankTol = 1e-8;

/// Rank tolerance from SYMPT_DEFAULT_TOL when set and parseable, else 1e-8.
inline double default_rank_tol() {
  if (const char* env = std::getenv("SYMPT_DEFAULT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultRankTol;
}

struct SpectralSummary {
  RVector eigenvalues;   // descending
  int rank = 0;
  CMatrix kernel_basis;  // orthonormal columns
  CMatrix range_basis;   // orthonormal columns, eigenvectors counted in the rank
  double tolerance_used = 0.0;
  double threshold = 0.0;  // absolute cutoff actually applied
  int borderline = 0;      // eigenvalues within a factor 10 of the cutoff

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  int kernel_dim() const { return dim() - rank; }
  double min_eigenvalue() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }
};

/// Eigenstructure of a Hermitian matrix with the relative numerical-rank rule
/// |λ| > rel_tol * max(|λ_max|, 1).
inline SpectralSummary spectral_summary(const CMatrix& m, double rel_tol = kDefaultRankTol) {
  if (m.rows() != m.cols()) throw invalid_input("spectral_summary: matrix is not square");
  if (m.size() == 0) return SpectralSummary{RVector(0), 0, CMatrix(0, 0), CMatrix(0, 0), rel_tol, 0.0, 0};
  if (hermiticity_error(m) > 1e-10) throw invalid_input("spectral_summary: matrix is not Hermitian");

  const Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  const RVector& asc = es.eigenvalues();
  const Eigen::Index d = asc.size();
  const double scale = std::max(asc.cwiseAbs().maxCoeff(), 1.0);
  const double cutoff = rel_tol * scale;

  SpectralSummary out;
  out.tolerance_used = rel_tol;
  out.threshold = cutoff;
  out.eigenvalues = asc.reverse();
  std::vector<Eigen::Index> kernel, range;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    const double a = std::abs(asc(i));
    (a > cutoff ? range : kernel).push_back(i);
    if (a > cutoff / 10 && a <= cutoff * 10) ++out.borderline;
  }
  out.rank = static_cast<int>(range.size());
  out.kernel_basis.resize(d, static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t c = 0; c < kernel.size(); ++c) out.kernel_basis.col(c) = es.eigenvectors().col(kernel[c]);
  out.range_basis.resize(d, static_cast<Eigen::Index>(range.size()));
  for (std::size_t c = 0; c < range.size(); ++c) out.range_basis.col(c) = es.eigenvectors().col(range[c]);
  return out;
}

/// Rank under the same rule as spectral_summary, without eigenvectors.
inline int numerical_rank(const CMatrix& m, double rel_tol = kDefaultRankTol) {
  if (m.size() == 0) return 0;
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double cutoff = rel_tol * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  return static_cast<int>((ev.array().abs() > cutoff).count());
}

/// The tuple (r(ρ), r(ρ^{T_1}), ..., r(ρ^{T_{floor(N/2)}})).
struct RankProfile {
  std::vector<int> ranks;

  RankProfile() = default;
  RankProfile(std::initializer_list<int> r) : ranks(r) {}
  explicit RankProfile(std::vector<int> r) : ranks(std::move(r)) {}

  int size() const { return static_cast<int>(ranks.size()); }
  int operator[](int k) const { return ranks.at(k); }
  int& operator[](int k) { return ranks.at(k); }
  int sum() const {
    int s = 0;
    for (int r : ranks) s += r;
    return s;
  }

  auto operator<=>(const RankProfile&) const = default;
  bool operator==(const RankProfile&) const = default;

  /// Joined with `sep`, e.g. "5-7-8".
  std::string to_string(std::string_view sep = "-") const {
    std::ostringstream os;
    for (std::size_t i = 0; i < ranks.size(); ++i) os << (i ? sep : "") << ranks[i];
    return os.str();
  }

  /// Accepts comma- or dash-separated integers.
  static RankProfile parse(std::string_view text) {
    RankProfile p;
    std::string cur;
    auto flush = [&] {
      if (cur.empty()) throw invalid_input("RankProfile::parse: empty entry in '" + std::string(text) + "'");
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(cur, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != cur.size() || v < 0) throw invalid_input("RankProfile::parse: bad entry '" + cur + "'");
      p.ranks.push_back(v);
      cur.clear();
    };
    for (char c : text) {
      if (c == ',' || c == '-') flush();
      else if (c != ' ') cur.push_back(c);
    }
    flush();
    return p;
  }
};

/// Entry k is (k+1)(N-k+1); entry 0 is N+1.
inline RankProfile max_rank_profile(int n) {
  if (n < 2) throw invalid_input("max_rank_profile: N must be >= 2");
  RankProfile p;
  for (int k = 0; k <= n / 2; ++k) p.ranks.push_back((k + 1) * (n - k + 1));
  return p;
}

/// Spectral summaries of ρ (index 0) and every partial transposition.
inline std::vector<SpectralSummary> view_spectra(const ViewSet& views, const CMatrix& op, double rel_tol) {
  std::vector<SpectralSummary> out;
  out.reserve(views.count() + 1);
  for (int k = 0; k <= views.count(); ++k) out.push_back(spectral_summary(hermitian_part(views.view(op, k)), rel_tol));
  return out;
}

inline RankProfile profile_of(const std::vector<SpectralSummary>& spectra) {
  RankProfile p;
  for (const auto& s : spectra) p.ranks.push_back(s.rank);
  return p;
}

inline RankProfile rank_profile(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  return profile_of(view_spectra(ViewSet(s.n_qubits()), s.matrix(), rel_tol));
}

struct PptResult {
  bool ppt = true;
  double min_eigenvalue = 0.0;  // most negative eigenvalue over the views
  int worst_k = 0;              // view attaining it
};

/// Positivity of every partial transposition k = 1..floor(N/2).
inline PptResult is_ppt(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  const ViewSet views(s.n_qubits());
  PptResult r{true, 0.0, 0};
  bool first = true;
  for (int k = 1; k <= views.count(); ++k) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(views.view(s.matrix(), k)), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (first || lo < r.min_eigenvalue) {
      r.min_eigenvalue = lo;
      r.worst_k = k;
      first = false;
    }
  }
  r.ppt = r.min_eigenvalue >= -rel_tol;
  return r;
}

}  // namespace sympt
