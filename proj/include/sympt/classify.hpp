#pragma once

// Rank-profile separability rules, edge and extremality exclusions, and the
// numerical product-vector machinery (search, subtraction, greedy decomposition).

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sympt/spectra.hpp"
#include "sympt/symcore.hpp"

namespace sympt {

enum class Verdict { Separable, GenericallySeparable, CandidateEntangled };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Separable: return "separable";
    case Verdict::GenericallySeparable: return "generically-separable";
    case Verdict::CandidateEntangled: return "candidate-entangled";
  }
  return "?";
}

namespace rules {
inline constexpr const char* kMaximalRank = "thm-maximal-rank";
inline constexpr const char* kPartialTransposeRank = "thm-pt-rank";
inline constexpr const char* kGeneric = "thm-generic";
inline constexpr const char* kConstructive = "constructive-certificate";
inline constexpr const char* kNpt = "npt";
}  // namespace rules

struct Classification {
  Verdict verdict = Verdict::CandidateEntangled;
  std::vector<std::string> triggered_rules;

  bool fired(std::string_view rule) const {
    return std::find(triggered_rules.begin(), triggered_rules.end(), rule) != triggered_rules.end();
  }
};

inline void check_profile(const RankProfile& p, int n) {
  if (n < 2 || n > kMaxQubits) throw invalid_input("rank profile: N outside [2, 30]");
  if (p.size() != n / 2 + 1) throw invalid_input("rank profile: expected floor(N/2)+1 entries");
  const RankProfile cap = max_rank_profile(n);
  for (int k = 0; k < p.size(); ++k)
    if (p[k] < 0 || p[k] > cap[k]) throw invalid_input("rank profile: entry exceeds its maximal rank");
}

struct ConfigCount {
  boost::multiprecision::cpp_int total;      // profiles with r(ρ) = N+1
  boost::multiprecision::cpp_int remaining;  // not (generically) separable by the rank rules
};

/// total = prod_{s=1}^{floor(N/2)} (s+1)(N-s+1), remaining = (floor(N/2)+1)!.
inline ConfigCount count_configs(int n) {
  if (n < 4 || n > kMaxQubits) throw invalid_input("count_configs: N outside [4, 30]");
  ConfigCount c{1, 1};
  for (int s = 1; s <= n / 2; ++s) c.total *= (s + 1) * (n - s + 1);
  for (int s = 2; s <= n / 2 + 1; ++s) c.remaining *= s;
  return c;
}

/// Separability verdict of a PPT state from its rank profile alone.
inline Classification classify_ranks(const RankProfile& p, int n) {
  check_profile(p, n);
  Classification c;
  if (p[0] <= n) c.triggered_rules.emplace_back(rules::kMaximalRank);
  for (int k = 1; k < p.size(); ++k)
    if (p[k] <= n - k + 1) {
      c.triggered_rules.emplace_back(rules::kPartialTransposeRank);
      break;
    }
  if (!c.triggered_rules.empty()) {
    c.verdict = Verdict::Separable;
    return c;
  }
  for (int k = 1; k < p.size(); ++k)
    if (p[k] <= (k + 1) * (n - k)) {
      c.triggered_rules.emplace_back(rules::kGeneric);
      c.verdict = Verdict::GenericallySeparable;
      return c;
    }
  c.verdict = Verdict::CandidateEntangled;
  return c;
}

/// True when the constraint count guarantees a nontrivial Hermitian solution,
/// i.e. sum_k r_k^2 >= sum_k max_k^2 - (N+1)^2 + 1 over k >= 1.
inline bool extremality_excluded(const RankProfile& p, int n) {
  check_profile(p, n);
  const RankProfile cap = max_rank_profile(n);
  long lhs = 0, rhs = 1 - static_cast<long>(n + 1) * (n + 1);
  for (int k = 1; k < p.size(); ++k) {
    lhs += static_cast<long>(p[k]) * p[k];
    rhs += static_cast<long>(cap[k]) * cap[k];
  }
  return lhs >= rhs;
}

/// Threshold of the extremality inequality for N.
inline long extremality_threshold(int n) {
  const RankProfile cap = max_rank_profile(n);
  long rhs = 1 - static_cast<long>(n + 1) * (n + 1);
  for (int k = 1; k < cap.size(); ++k) rhs += static_cast<long>(cap[k]) * cap[k];
  return rhs;
}

enum class EdgeExclusion { NotEdge, GenericallyNotEdge, Unknown };

inline const char* to_string(EdgeExclusion e) {
  switch (e) {
    case EdgeExclusion::NotEdge: return "not-edge";
    case EdgeExclusion::GenericallyNotEdge: return "generically-not-edge";
    case EdgeExclusion::Unknown: return "unknown";
  }
  return "?";
}

/// Table of rank profiles known not to host edge states.
inline EdgeExclusion edge_excluded(const RankProfile& p, int n) {
  check_profile(p, n);
  const RankProfile cap = max_rank_profile(n);
  if (p == cap) return EdgeExclusion::NotEdge;
  if (n == 4 && p == RankProfile{5, 8, 8}) return EdgeExclusion::NotEdge;
  if (n == 6 && p == RankProfile{7, 12, 15, 15}) return EdgeExclusion::NotEdge;
  if (n == 4 && p == RankProfile{5, 8, 7}) return EdgeExclusion::GenericallyNotEdge;

  // All ranks maximal except one view 1 <= k <= ceil(N/2)-1, lowered by exactly one.
  int lowered = -1;
  for (int k = 0; k < p.size(); ++k) {
    if (p[k] == cap[k]) continue;
    if (lowered >= 0 || p[k] != cap[k] - 1) return EdgeExclusion::Unknown;
    lowered = k;
  }
  if (lowered >= 1 && lowered <= (n + 1) / 2 - 1) return EdgeExclusion::GenericallyNotEdge;
  return EdgeExclusion::Unknown;
}

inline constexpr double kProductVectorThreshold = 1e-16;

/// Sum over k = 0..floor(N/2) of squared overlaps between the kernel of view k
/// and the normalized, partially conjugated product vector.
class ProductResidual {
 public:
  ProductResidual(const SymmetricState& s, double rel_tol) : n_(s.n_qubits()) {
    const auto spectra = view_spectra(ViewSet(n_), s.matrix(), rel_tol);
    for (const auto& sp : spectra) {
      kernels_.push_back(sp.kernel_basis.adjoint());
      total_kernel_ += sp.kernel_dim();
    }
  }

  int n() const { return n_; }
  int total_kernel_dim() const { return total_kernel_; }

  double operator()(const ProductVector& e) const {
    const ProductVector u = e.normalized();
    double f = 0.0;
    for (int k = 0; k < static_cast<int>(kernels_.size()); ++k) {
      if (kernels_[k].rows() == 0) continue;
      f += (kernels_[k] * detail::split_coords(u, n_, k)).squaredNorm();
    }
    return f;
  }

  /// Stacked complex overlaps, the vector whose squared norm is the residual.
  CVector overlaps(const ProductVector& e) const {
    const ProductVector u = e.normalized();
    CVector r(total_kernel_);
    Eigen::Index off = 0;
    for (int k = 0; k < static_cast<int>(kernels_.size()); ++k) {
      if (kernels_[k].rows() == 0) continue;
      r.segment(off, kernels_[k].rows()) = kernels_[k] * detail::split_coords(u, n_, k);
      off += kernels_[k].rows();
    }
    return r;
  }

 private:
  int n_;
  int total_kernel_ = 0;
  std::vector<CMatrix> kernels_;  // kernel bases as rows (adjoint)
};

struct EdgeReport {
  std::optional<ProductVector> found_vector;
  ProductVector best = ProductVector::from_alpha(0.0);
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

/// Local stereographic chart: (1, x+iy) when upper, else (x+iy, 1).
struct Chart {
  bool upper = true;
  ProductVector at(double x, double y) const {
    const cplx z{x, y};
    return upper ? ProductVector{1.0, z} : ProductVector{z, 1.0};
  }
  static std::pair<Chart, std::array<double, 2>> around(const ProductVector& e) {
    if (std::abs(e.a()) >= std::abs(e.b())) {
      const cplx z = e.b() / e.a();
      return {Chart{true}, {z.real(), z.imag()}};
    }
    const cplx z = e.a() / e.b();
    return {Chart{false}, {z.real(), z.imag()}};
  }
};

/// Derivative-free Nelder-Mead on R^2; returns the best vertex.
template <class F>
std::array<double, 2> nelder_mead(F&& f, std::array<double, 2> x0, double step, int iterations) {
  using P = std::array<double, 2>;
  std::array<P, 3> v{x0, P{x0[0] + step, x0[1]}, P{x0[0], x0[1] + step}};
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  auto lerp = [](const P& a, const P& b, double t) { return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };
  for (int it = 0; it < iterations; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const P& best = v[idx[0]];
    const P& mid = v[idx[1]];
    const int w = idx[2];
    const P centroid{(best[0] + mid[0]) / 2, (best[1] + mid[1]) / 2};
    const P refl = lerp(centroid, v[w], -1.0);
    const double fr = f(refl);
    if (fr < fv[idx[0]]) {
      const P exp = lerp(centroid, v[w], -2.0);
      const double fe = f(exp);
      if (fe < fr) v[w] = exp, fv[w] = fe;
      else v[w] = refl, fv[w] = fr;
    } else if (fr < fv[idx[1]]) {
      v[w] = refl, fv[w] = fr;
    } else {
      const P con = lerp(centroid, v[w], 0.5);
      const double fc = f(con);
      if (fc < fv[w]) {
        v[w] = con, fv[w] = fc;
      } else {
        for (int j : {idx[1], idx[2]}) {
          v[j] = lerp(v[idx[0]], v[j], 0.5);
          fv[j] = f(v[j]);
        }
      }
    }
  }
  const int b = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return v[b];
}

/// Gauss-Newton polish of a zero-residual root with a central-difference Jacobian.
inline std::array<double, 2> gauss_newton_polish(const ProductResidual& res, const Chart& chart,
                                                 std::array<double, 2> x, int iterations) {
  auto stacked = [&](double a, double b) {
    const CVector r = res.overlaps(chart.at(a, b));
    RVector out(2 * r.size());
    out << r.real(), r.imag();
    return out;
  };
  double fx = stacked(x[0], x[1]).squaredNorm();
  for (int it = 0; it < iterations && fx > 0; ++it) {
    const double h = 1e-7 * std::max(1.0, std::hypot(x[0], x[1]));
    const RVector r0 = stacked(x[0], x[1]);
    Eigen::MatrixXd jac(r0.size(), 2);
    jac.col(0) = (stacked(x[0] + h, x[1]) - stacked(x[0] - h, x[1])) / (2 * h);
    jac.col(1) = (stacked(x[0], x[1] + h) - stacked(x[0], x[1] - h)) / (2 * h);
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-r0);
    if (!step.allFinite()) break;
    const std::array<double, 2> cand{x[0] + step(0), x[1] + step(1)};
    const double fc = stacked(cand[0], cand[1]).squaredNorm();
    if (!(fc < fx)) break;
    x = cand;
    fx = fc;
  }
  return x;
}

inline bool lex_less(const ProductVector& u, const ProductVector& v) {
  const auto key = [](const ProductVector& e) {
    const auto a = e.alpha();
    if (!a) return std::array<double, 3>{1.0, 0.0, 0.0};
    return std::array<double, 3>{0.0, a->real(), a->imag()};
  };
  return key(u) < key(v);
}

}  // namespace detail

struct ProductSearchOptions {
  int grid = 64;             // grid x grid points on the sphere, plus both poles
  int refine_iterations = 200;
  int candidates = 8;        // best grid points refined locally
  double threshold = kProductVectorThreshold;
  double rel_tol = kDefaultRankTol;
};

/// Searches for e with e^{⊗N} in R(ρ) and every partial conjugate in R(ρ^{T_k}).
inline EdgeReport find_product_vector(const ProductResidual& res, const ProductSearchOptions& opt = {}) {
  struct Candidate {
    ProductVector e;
    double f;
  };
  std::vector<Candidate> grid;
  grid.reserve(static_cast<std::size_t>(opt.grid) * opt.grid + 2);
  grid.push_back({ProductVector::from_alpha(0.0), 0.0});
  grid.push_back({ProductVector::pole(), 0.0});
  for (int i = 0; i < opt.grid; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / opt.grid;
    for (int j = 0; j < opt.grid; ++j)
      grid.push_back({ProductVector::from_angles(theta, 2 * std::numbers::pi * j / opt.grid), 0.0});
  }
  for (auto& c : grid) c.f = res(c.e);

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.f != b.f) return a.f < b.f;
    return detail::lex_less(a.e, b.e);
  };
  std::sort(grid.begin(), grid.end(), better);

  EdgeReport rep;
  if (res.total_kernel_dim() == 0) {
    rep.best = grid.front().e;
    rep.residual = 0.0;
    rep.found_vector = rep.best;
    return rep;
  }

  std::vector<Candidate> refined;
  const double spacing = std::numbers::pi / opt.grid;
  for (int c = 0; c < std::min<int>(opt.candidates, static_cast<int>(grid.size())); ++c) {
    const auto [chart, x0] = detail::Chart::around(grid[c].e);
    auto f = [&, chart = chart](const std::array<double, 2>& x) { return res(chart.at(x[0], x[1])); };
    auto x = detail::nelder_mead(f, x0, spacing, opt.refine_iterations);
    x = detail::gauss_newton_polish(res, chart, x, 30);
    rep.iterations += opt.refine_iterations;
    ProductVector e = chart.at(x[0], x[1]);
    if (auto a = e.alpha(); a && std::abs(*a) <= 1e12) e = ProductVector::from_alpha(*a);
    else e = ProductVector::pole();
    refined.push_back({e, res(e)});
  }
  const auto it = std::min_element(refined.begin(), refined.end(), better);
  rep.best = it->e;
  rep.residual = it->f;
  if (rep.residual < opt.threshold) rep.found_vector = rep.best;
  return rep;
}

inline EdgeReport find_product_vector(const SymmetricState& s, const ProductSearchOptions& opt = {}) {
  return find_product_vector(ProductResidual(s, opt.rel_tol), opt);
}

struct SubtractionResult {
  CMatrix remainder;  // unit trace unless exhausted (then zero)
  double lambda_star = 0.0;
  bool exhausted = false;  // the whole state was the product projector
};

/// Removes the largest multiple λ* of [e^{⊗N}] that keeps ρ and every view positive.
inline SubtractionResult subtract_product_vector(const SymmetricState& s, const ProductVector& e,
                                                 double threshold = kProductVectorThreshold,
                                                 double rel_tol = kDefaultRankTol) {
  const int n = s.n_qubits();
  const ViewSet views(n);
  const auto spectra = view_spectra(views, s.matrix(), rel_tol);
  {
    const ProductVector u = e.normalized();
    double f = 0.0;
    for (int k = 0; k <= views.count(); ++k)
      f += (spectra[k].kernel_basis.adjoint() * detail::split_coords(u, n, k)).squaredNorm();
    if (!(f < threshold)) throw invalid_input("subtract_product_vector: vector is not in every range");
  }
  const ProductVector u = e.normalized();
  double lambda = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= views.count(); ++k) {
    const auto& sp = spectra[k];
    const CVector proj = sp.range_basis.adjoint() * detail::split_coords(u, n, k);
    double q = 0.0;
    for (int i = 0; i < sp.rank; ++i) {
      // range eigenvalues are the leading (descending) entries
      q += std::norm(proj(i)) / sp.eigenvalues(i);
    }
    if (q > 0) lambda = std::min(lambda, 1.0 / q);
  }
  const CVector v = detail::dicke_coords(u.a(), u.b(), n);
  SubtractionResult out;
  out.lambda_star = std::min(lambda, 1.0);
  if (out.lambda_star > 1.0 - 1e-12) {
    out.exhausted = true;
    out.remainder = CMatrix::Zero(n + 1, n + 1);
    return out;
  }
  CMatrix rem = hermitian_part(s.matrix() - out.lambda_star * (v * v.adjoint()));
  rem /= rem.trace().real();
  out.remainder = std::move(rem);
  return out;
}

struct WeightedProduct {
  double weight = 0.0;
  ProductVector vector;
};

struct Decomposition {
  bool success = false;
  std::vector<WeightedProduct> terms;
  CMatrix remainder;            // normalized irreducible remainder on failure
  double remainder_weight = 0;  // mass not accounted for by the terms
  double reconstruction_error = 0;
};

/// Greedy constructive certificate: repeatedly find and subtract product vectors.
inline Decomposition decompose_separable(const SymmetricState& s, int max_terms = -1,
                                         const ProductSearchOptions& opt = {}) {
  const int n = s.n_qubits();
  if (max_terms < 0) max_terms = (n + 1) * (n + 1);
  Decomposition d;
  CMatrix current = s.matrix();
  double mass = 1.0;
  bool finished = false;
  for (int it = 0; it < max_terms && !finished; ++it) {
    SymmetricState cur = SymmetricState::normalized(n, current);
    const EdgeReport rep = find_product_vector(cur, opt);
    if (!rep.found_vector) break;
    SubtractionResult sub;
    try {
      sub = subtract_product_vector(cur, *rep.found_vector, opt.threshold, opt.rel_tol);
    } catch (const invalid_input&) {
      break;
    }
    d.terms.push_back({mass * sub.lambda_star, rep.found_vector->normalized()});
    mass *= 1.0 - sub.lambda_star;
    if (sub.exhausted || mass < 1e-12) {
      finished = true;
      mass = 0.0;
    } else {
      current = std::move(sub.remainder);
    }
  }
  CMatrix recon = CMatrix::Zero(n + 1, n + 1);
  for (const auto& t : d.terms) {
    const CVector v = detail::dicke_coords(t.vector.a(), t.vector.b(), n);
    recon += t.weight * (v * v.adjoint());
  }
  d.remainder_weight = mass;
  if (finished) {
    d.reconstruction_error = (recon - s.matrix()).cwiseAbs().maxCoeff();
    d.success = d.reconstruction_error < 1e-8;
    d.remainder = CMatrix::Zero(n + 1, n + 1);
  } else {
    d.reconstruction_error = (recon + mass * current - s.matrix()).cwiseAbs().maxCoeff();
    d.remainder = current;
  }
  return d;
}

/// Upper bound on the Schmidt number certified by half-system compression.
///
/// Returns ceil(N/2) for odd N and N/2 for even N when the compressed
/// 2 x (floor(N/2)+1) state is PPT and supported; 1 for pure product states.
inline std::optional<int> schmidt_bound(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  const int n = s.n_qubits();
  if (n < 2) return std::nullopt;
  if (rank_profile(s, rel_tol).sum() == n / 2 + 1) return 1;

  const HalfCompressedState h = compress_half(s);
  const int rest = h.rest_dim;
  const CMatrix pt = hermitian_part(partial_transpose_first(h.matrix, 2, rest));
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(pt, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -rel_tol) return std::nullopt;

  CMatrix qubit = CMatrix::Zero(2, 2);
  CMatrix other = CMatrix::Zero(rest, rest);
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp)
      for (int j = 0; j < rest; ++j) {
        qubit(b, bp) += h.matrix(b * rest + j, bp * rest + j);
      }
  for (int j = 0; j < rest; ++j)
    for (int jp = 0; jp < rest; ++jp)
      for (int b = 0; b < 2; ++b) other(j, jp) += h.matrix(b * rest + j, b * rest + jp);
  if (spectral_summary(hermitian_part(qubit), rel_tol).rank < 2) return std::nullopt;
  if (spectral_summary(hermitian_part(other), rel_tol).rank < rest) return std::nullopt;
  return n % 2 ? (n + 1) / 2 : n / 2;
}

/// Everything the classifier can say about a single state.
struct Assessment {
  RankProfile profile;
  PptResult ppt;
  Classification classification;
  EdgeReport edge;
  std::optional<Decomposition> decomposition;
  std::optional<int> schmidt;
  EdgeExclusion edge_exclusion = EdgeExclusion::Unknown;
  bool extremality_excluded = false;
};

inline Assessment assess_state(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  const int n = s.n_qubits();
  Assessment a;
  a.profile = rank_profile(s, rel_tol);
  a.ppt = is_ppt(s, rel_tol);
  if (!a.ppt.ppt) {
    a.classification = {Verdict::CandidateEntangled, {rules::kNpt}};
    return a;
  }
  ProductSearchOptions opt;
  opt.rel_tol = rel_tol;
  a.classification = classify_ranks(a.profile, n);
  a.edge = find_product_vector(s, opt);
  a.schmidt = schmidt_bound(s, rel_tol);
  if (n >= 2) {
    a.edge_exclusion = edge_excluded(a.profile, n);
    a.extremality_excluded = a.profile[0] == n + 1 && extremality_excluded(a.profile, n);
  }
  if (a.edge.found_vector && a.profile != max_rank_profile(n)) {
    a.decomposition = decompose_separable(s, -1, opt);
    if (a.decomposition->success) {
      a.classification.verdict = Verdict::Separable;
      a.classification.triggered_rules.emplace_back(rules::kConstructive);
    }
  }
  return a;
}

}  // namespace sympt
