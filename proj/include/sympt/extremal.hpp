#pragma once

// Randomized search for extremal points of the set of PPT symmetric states.
//
// A Hermitian h is admissible when h^{T_k} annihilates the kernel of ρ^{T_k}
// for every k = 0..floor(N/2). Moving along ρ(x) = (1 + x Tr h) ρ - x h until
// a view acquires a new zero eigenvalue lowers one rank per step; the state is
// extremal once ρ itself spans the admissible set.

#include <Eigen/QR>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sympt/classify.hpp"
#include "sympt/spectra.hpp"
#include "sympt/symcore.hpp"

namespace sympt {

inline constexpr double kNullTol = 1e-9;
inline constexpr double kCrossingTol = 1e-10;

/// Real coordinates of a Hermitian matrix in the Hilbert-Schmidt orthonormal
/// basis {E_aa} ∪ {(E_ab+E_ba)/√2, i(E_ab-E_ba)/√2 : a<b}.
inline RVector hermitian_coordinates(const CMatrix& h) {
  const Eigen::Index d = h.rows();
  RVector v(d * d);
  Eigen::Index p = 0;
  for (Eigen::Index a = 0; a < d; ++a) v(p++) = h(a, a).real();
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) {
      v(p++) = std::sqrt(2.0) * h(a, b).real();
      v(p++) = std::sqrt(2.0) * h(a, b).imag();
    }
  return v;
}

inline CMatrix hermitian_from_coordinates(const RVector& v, Eigen::Index d) {
  CMatrix h = CMatrix::Zero(d, d);
  Eigen::Index p = 0;
  for (Eigen::Index a = 0; a < d; ++a) h(a, a) = v(p++);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const cplx z{v(p), v(p + 1)};
      p += 2;
      h(a, b) = z / std::sqrt(2.0);
      h(b, a) = std::conj(z) / std::sqrt(2.0);
    }
  return h;
}

namespace detail {

/// Entry of the view isometry (1 for k = 0).
inline double view_beta(const ViewSet& views, int k, int i, int j) {
  if (k == 0) return 1.0;
  const auto& iso = views.isometry(k);
  return iso.matrix(i * iso.cols_dim() + j, i + j);
}

/// Rows encoding h^{T_k} psi = 0 (real parts, then imaginary parts) for each
/// kernel vector psi of view k.
inline RMatrix constraint_block(const ViewSet& views, int k, const CMatrix& kernel) {
  const int n = views.n();
  const int d = n + 1;
  const int rows_dim = k == 0 ? 1 : k + 1;
  const int cols_dim = n - k + 1;
  const int dim = rows_dim * cols_dim;
  const Eigen::Index nk = kernel.cols();

  // parameter index of the real and imaginary part of h[a,b], a < b
  std::vector<int> pair_index(static_cast<std::size_t>(d) * d, -1);
  {
    int p = d;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        pair_index[a * d + b] = p;
        p += 2;
      }
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  RMatrix block = RMatrix::Zero(2 * dim * nk, static_cast<Eigen::Index>(d) * d);
  std::vector<double> beta(static_cast<std::size_t>(dim));
  for (int i = 0; i < rows_dim; ++i)
    for (int j = 0; j < cols_dim; ++j) beta[i * cols_dim + j] = view_beta(views, k, i, j);

  for (Eigen::Index v = 0; v < nk; ++v) {
    const Eigen::Index re0 = 2 * dim * v;
    const Eigen::Index im0 = re0 + dim;
    for (int i = 0; i < rows_dim; ++i)
      for (int j = 0; j < cols_dim; ++j) {
        const Eigen::Index row = i * cols_dim + j;
        for (int ip = 0; ip < rows_dim; ++ip) {
          const int a = ip + j;
          const double b1 = beta[ip * cols_dim + j];
          for (int jp = 0; jp < cols_dim; ++jp) {
            const int b = i + jp;
            const cplx c = b1 * beta[i * cols_dim + jp] * kernel(ip * cols_dim + jp, v);
            if (c == cplx{}) continue;
            if (a == b) {
              block(re0 + row, a) += c.real();
              block(im0 + row, a) += c.imag();
            } else if (a < b) {
              const int p = pair_index[a * d + b];
              const cplx cx = c * inv_sqrt2, cy = cplx{0, 1} * c * inv_sqrt2;
              block(re0 + row, p) += cx.real();
              block(im0 + row, p) += cx.imag();
              block(re0 + row, p + 1) += cy.real();
              block(im0 + row, p + 1) += cy.imag();
            } else {
              const int p = pair_index[b * d + a];
              const cplx cx = c * inv_sqrt2, cy = cplx{0, -1} * c * inv_sqrt2;
              block(re0 + row, p) += cx.real();
              block(im0 + row, p) += cx.imag();
              block(re0 + row, p + 1) += cy.real();
              block(im0 + row, p + 1) += cy.imag();
            }
          }
        }
      }
  }
  return block;
}

/// Orthonormal basis of the (numerical) nullspace of a, plus its singular values.
inline RMatrix nullspace(const RMatrix& a, double null_tol, RVector* singular = nullptr) {
  const Eigen::Index m = a.cols();
  if (a.rows() == 0) return RMatrix::Identity(m, m);
  RMatrix square;
  if (a.rows() > m) {
    Eigen::HouseholderQR<RMatrix> qr(a);
    square = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  } else {
    square = a;
  }
  Eigen::JacobiSVD<RMatrix> svd(square, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  if (singular) *singular = s;
  const double cutoff = null_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(m - rank);
}

}  // namespace detail

/// Stacked real constraint matrix R with R·vec(h) = 0 iff h is admissible.
inline RMatrix build_constraint_system(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  const ViewSet views(s.n_qubits());
  const auto spectra = view_spectra(views, s.matrix(), rel_tol);
  std::vector<RMatrix> blocks;
  Eigen::Index rows = 0;
  for (int k = 0; k <= views.count(); ++k) {
    blocks.push_back(detail::constraint_block(views, k, spectra[k].kernel_basis));
    rows += blocks.back().rows();
  }
  const Eigen::Index cols = static_cast<Eigen::Index>(s.dim()) * s.dim();
  RMatrix r(rows, cols);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    r.middleRows(off, b.rows()) = b;
    off += b.rows();
  }
  return r;
}

struct ConstraintAnalysis {
  RMatrix null_basis;  // columns: orthonormal coordinates of admissible h
  int nullity = 0;
  int rows = 0;        // total real constraint rows
};

/// Nullspace of the constraint system, intersected view by view.
inline ConstraintAnalysis analyze_constraints(const ViewSet& views, const std::vector<SpectralSummary>& spectra,
                                              double null_tol = kNullTol) {
  const Eigen::Index d = views.n() + 1;
  RMatrix q = RMatrix::Identity(d * d, d * d);
  int rows = 0;
  for (int k = 0; k <= views.count() && q.cols() > 0; ++k) {
    if (spectra[k].kernel_dim() == 0) continue;
    const RMatrix block = detail::constraint_block(views, k, spectra[k].kernel_basis);
    rows += static_cast<int>(block.rows());
    const RMatrix z = detail::nullspace(block * q, null_tol);
    q = q * z;
  }
  return ConstraintAnalysis{q, static_cast<int>(q.cols()), rows};
}

inline ConstraintAnalysis analyze_constraints(const SymmetricState& s, double rel_tol = kDefaultRankTol,
                                              double null_tol = kNullTol) {
  const ViewSet views(s.n_qubits());
  return analyze_constraints(views, view_spectra(views, s.matrix(), rel_tol), null_tol);
}

/// Removes the component of ρ that violates its own kernel constraints.
inline CMatrix project_onto_face(const CMatrix& rho, const ConstraintAnalysis& ca) {
  const RVector v = hermitian_coordinates(rho);
  CMatrix out = hermitian_from_coordinates(ca.null_basis * (ca.null_basis.transpose() * v), rho.rows());
  out /= out.trace().real();
  return out;
}

struct HermitianDirection {
  CMatrix matrix;  // Frobenius norm 1, orthogonal to ρ
  double trace = 0.0;
};

/// Random admissible direction linearly independent of ρ, or nullopt when ρ is extremal.
template <class Rng>
std::optional<HermitianDirection> draw_direction(const CMatrix& rho, const ConstraintAnalysis& ca, Rng& rng) {
  if (ca.nullity == 0) throw internal_error("constraint system has no solution; ρ must solve its own system");
  if (ca.nullity == 1) return std::nullopt;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const RVector vr = hermitian_coordinates(rho).normalized();
  for (int attempt = 0; attempt < 16; ++attempt) {
    RVector c(ca.nullity);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
    RVector v = ca.null_basis * c;
    v -= vr.dot(v) * vr;
    const double nv = v.norm();
    if (nv < 1e-8 * c.norm()) continue;
    v /= nv;
    CMatrix h = hermitian_from_coordinates(v, rho.rows());
    const double tr = h.trace().real();
    return HermitianDirection{std::move(h), tr};
  }
  throw internal_error("draw_direction: nullspace collapses onto ρ");
}

inline std::optional<HermitianDirection> find_direction(const SymmetricState& s, std::uint64_t rng_seed,
                                                        double rel_tol = kDefaultRankTol) {
  std::mt19937_64 rng(rng_seed);
  return draw_direction(s.matrix(), analyze_constraints(s, rel_tol), rng);
}

struct LineStep {
  CMatrix state;  // Hermitian, unit trace
  double x_star = 0.0;
  std::vector<int> dropped_views;
  std::vector<SpectralSummary> spectra;  // of the new state
  RankProfile profile;

  int dropped_view() const { return dropped_views.empty() ? -1 : dropped_views.front(); }
};

/// ρ(x) = (1 + x Tr h) ρ - x h.
inline CMatrix move_along(const CMatrix& rho, const HermitianDirection& h, double x) {
  return (1.0 + x * h.trace) * rho - x * h.matrix;
}

/// Moves to the first x where some view of ρ(x) gains a zero eigenvalue.
///
/// Brackets by doubling from |x| = 1e-3 until the smallest range eigenvalue of
/// some view drops below -1e-10, bisects to width 1e-12 and finishes with one
/// secant step. The positive direction is tried first.
inline LineStep line_search_step(const ViewSet& views, const CMatrix& rho, const std::vector<SpectralSummary>& spectra,
                                 const HermitianDirection& h, double rel_tol = kDefaultRankTol) {
  const int m = views.count();
  std::vector<CMatrix> a(m + 1), hh(m + 1);
  for (int k = 0; k <= m; ++k) {
    const CMatrix& u = spectra[k].range_basis;
    a[k] = u.adjoint() * views.view(rho, k) * u;
    hh[k] = u.adjoint() * views.view(h.matrix, k) * u;
  }
  auto min_eig = [&](double x) {
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= m; ++k) {
      if (a[k].rows() == 0) continue;
      const CMatrix mk = hermitian_part((1.0 + x * h.trace) * a[k] - x * hh[k]);
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(mk, Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues()(0));
    }
    return lo;
  };

  std::optional<double> hi;
  double sign = 1.0;
  for (double s : {1.0, -1.0}) {
    for (double x = 1e-3; x <= 1e6; x *= 2) {
      if (min_eig(s * x) < -kCrossingTol) {
        hi = x;
        break;
      }
    }
    if (hi) {
      sign = s;
      break;
    }
  }
  if (!hi) throw degenerate_direction("line_search_step: no eigenvalue crossing within |x| <= 1e6");

  double lo = 0.0, up = *hi;
  while (up - lo > 1e-12) {
    const double mid = 0.5 * (lo + up);
    if (mid <= lo || mid >= up) break;
    (min_eig(sign * mid) < 0.0 ? up : lo) = mid;
  }
  // secant across the final bracket puts the crossing eigenvalue at roundoff level
  double x = lo;
  const double f_lo = min_eig(sign * lo), f_up = min_eig(sign * up);
  if (f_lo > 0.0 && f_up < 0.0) x = lo + f_lo / (f_lo - f_up) * (up - lo);

  LineStep out;
  out.x_star = sign * x;
  CMatrix next = hermitian_part(move_along(rho, h, out.x_star));
  next /= next.trace().real();
  out.spectra = view_spectra(views, next, rel_tol);
  out.profile = profile_of(out.spectra);
  const RankProfile before = profile_of(spectra);
  for (int k = 0; k <= m; ++k)
    if (out.profile[k] < before[k]) out.dropped_views.push_back(k);
  out.state = std::move(next);
  if (out.dropped_views.empty()) throw degenerate_direction("line_search_step: no rank decreased");
  return out;
}

inline LineStep line_search_step(const SymmetricState& s, const HermitianDirection& h,
                                 double rel_tol = kDefaultRankTol) {
  const ViewSet views(s.n_qubits());
  return line_search_step(views, s.matrix(), view_spectra(views, s.matrix(), rel_tol), h, rel_tol);
}

/// Counter-based seed for run `index` of a campaign (splitmix64 finalizer).
inline std::uint64_t run_seed(std::uint64_t campaign_seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(campaign_seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

/// Decides whether a proposed step (profile before -> after) is acceptable.
using StepPredicate = std::function<bool(const RankProfile& before, const RankProfile& after)>;

/// Accepts steps that keep every entry at or above `floor`.
inline StepPredicate target_floor(RankProfile floor) {
  return [floor = std::move(floor)](const RankProfile&, const RankProfile& after) {
    for (int k = 0; k < after.size() && k < floor.size(); ++k)
      if (after[k] < floor[k]) return false;
    return true;
  };
}

struct SearchOptions {
  double rank_tol = kDefaultRankTol;
  double null_tol = kNullTol;
  int max_redraws = 10;
  StepPredicate accept;  // targeted mode when set
  int max_targeted_tries = 50;
  bool keep_states = false;
};

struct TrajectoryStep {
  RankProfile profile;  // after the step
  double x_star = 0.0;
  int dropped_view = -1;
  std::vector<int> dropped_views;
  int nullity_of_constraints = 0;  // of the state the step started from
  bool targeted = true;            // false when targeted mode gave up for this step
  double wall_ms = 0.0;
};

struct SearchTrajectory {
  std::uint64_t seed = 0;
  RankProfile initial_profile;
  std::vector<TrajectoryStep> steps;
  std::vector<CMatrix> states;  // intermediate states when keep_states is set
  CMatrix terminal;
  RankProfile terminal_profile;
  bool terminal_extremal = false;
  int terminal_nullity = 0;
  Classification terminal_classification;
  std::optional<CMatrix> last_candidate;  // last state the rank rules leave undecided
  RankProfile last_candidate_profile;
  int terminal_borderline = 0;  // eigenvalues within 10x of the rank cutoff
  bool aborted = false;
  std::string diagnostic;

  double mean_step_ms() const {
    if (steps.empty()) return 0.0;
    double t = 0.0;
    for (const auto& s : steps) t += s.wall_ms;
    return t / static_cast<double>(steps.size());
  }

  /// Extremal with rank > 1, hence PPT entangled.
  bool entangled() const { return terminal_extremal && !terminal_profile.ranks.empty() && terminal_profile[0] > 1; }
};

/// Lowers ranks with random admissible directions until ρ is extremal.
inline SearchTrajectory run_to_extremal(const SymmetricState& initial, std::uint64_t rng_seed,
                                        const SearchOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const int n = initial.n_qubits();
  const ViewSet views(n);
  std::mt19937_64 rng(rng_seed);

  SearchTrajectory tr;
  tr.seed = rng_seed;
  CMatrix rho = initial.matrix();
  auto spectra = view_spectra(views, rho, opt.rank_tol);
  tr.initial_profile = profile_of(spectra);
  if (opt.keep_states) tr.states.push_back(rho);
  const int step_cap = max_rank_profile(n).sum() + 1;

  for (int iter = 0;; ++iter) {
    const auto t0 = clock::now();
    const RankProfile profile = profile_of(spectra);
    if (classify_ranks(profile, n).verdict == Verdict::CandidateEntangled) {
      tr.last_candidate = rho;
      tr.last_candidate_profile = profile;
    }
    ConstraintAnalysis ca = analyze_constraints(views, spectra, opt.null_tol);
    if (iter > 0 && ca.nullity >= 1) {
      rho = project_onto_face(rho, ca);
      spectra = view_spectra(views, rho, opt.rank_tol);
      ca = analyze_constraints(views, spectra, opt.null_tol);
    }
    if (ca.nullity == 1) {
      tr.terminal_extremal = true;
      tr.terminal_nullity = 1;
      break;
    }
    if (iter >= step_cap) {
      tr.aborted = true;
      tr.diagnostic = "step cap exceeded without reaching an extremal state";
      tr.terminal_nullity = ca.nullity;
      break;
    }

    std::optional<LineStep> chosen;
    bool targeted = true;
    int failures = 0;
    int tries = 0;
    while (!chosen) {
      std::optional<HermitianDirection> h = draw_direction(rho, ca, rng);
      if (!h) break;
      try {
        LineStep step = line_search_step(views, rho, spectra, *h, opt.rank_tol);
        ++tries;
        if (!opt.accept || opt.accept(profile, step.profile) || tries >= opt.max_targeted_tries) {
          targeted = !opt.accept || opt.accept(profile, step.profile);
          chosen = std::move(step);
        }
      } catch (const degenerate_direction& e) {
        if (++failures > opt.max_redraws) {
          tr.aborted = true;
          tr.diagnostic = e.what();
          break;
        }
      }
    }
    if (!chosen) {
      tr.terminal_nullity = ca.nullity;
      break;
    }

    TrajectoryStep st;
    st.profile = chosen->profile;
    st.x_star = chosen->x_star;
    st.dropped_views = chosen->dropped_views;
    st.dropped_view = chosen->dropped_view();
    st.nullity_of_constraints = ca.nullity;
    st.targeted = targeted;
    rho = std::move(chosen->state);
    spectra = std::move(chosen->spectra);
    st.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    tr.steps.push_back(std::move(st));
    if (opt.keep_states) tr.states.push_back(rho);
  }

  tr.terminal = rho;
  tr.terminal_profile = profile_of(spectra);
  for (const auto& sp : spectra) tr.terminal_borderline += sp.borderline;
  tr.terminal_classification = classify_ranks(tr.terminal_profile, n);
  return tr;
}

/// Starts from the maximally mixed symmetric state.
inline SearchTrajectory run_to_extremal(int n, std::uint64_t rng_seed, const SearchOptions& opt = {}) {
  return run_to_extremal(SymmetricState::maximally_mixed(n), rng_seed, opt);
}

}  // namespace sympt
