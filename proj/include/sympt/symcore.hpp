#pragma once

// Compressed Dicke-basis representation of N-qubit permutation-symmetric
// operators.
//
// A symmetric operator on (C^2)^{⊗N} is stored as an (N+1)x(N+1) matrix in the
// normalized Dicke basis |D_m^N>, m = number of excitations. Partial
// transpositions over the first k qubits live on the (k+1)(N-k+1)-dimensional
// space S_k ⊗ S_{N-k}, row index (i, j) -> i*(N-k+1) + j.

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sympt/binomial.hpp"
#include "sympt/errors.hpp"

namespace sympt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr int kMaxFullSpaceQubits = 12;

/// Largest entrywise deviation |M - M^†|.
inline double hermiticity_error(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

/// Single-qubit amplitude pair (a, b) generating the symmetric product (a, b)^{⊗N}.
class ProductVector {
 public:
  ProductVector(cplx a, cplx b) : a_(a), b_(b) {
    if (a == cplx{} && b == cplx{}) throw invalid_input("ProductVector: amplitude pair is zero");
  }

  /// Canonical form (1, alpha).
  static ProductVector from_alpha(cplx alpha) { return {cplx{1.0}, alpha}; }
  /// The pole alpha = infinity, i.e. (0, 1).
  static ProductVector pole() { return {cplx{}, cplx{1.0}}; }
  /// Point on the Bloch sphere: (cos(theta/2), e^{i phi} sin(theta/2)).
  static ProductVector from_angles(double theta, double phi) {
    return {cplx{std::cos(theta / 2)}, std::polar(std::sin(theta / 2), phi)};
  }

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  /// b / a, or nullopt at the pole.
  std::optional<cplx> alpha() const {
    if (a_ == cplx{}) return std::nullopt;
    return b_ / a_;
  }
  double norm_sq() const { return std::norm(a_) + std::norm(b_); }
  ProductVector normalized() const {
    const double s = std::sqrt(norm_sq());
    return {a_ / s, b_ / s};
  }

 private:
  cplx a_;
  cplx b_;
};

namespace detail {

inline void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits) throw invalid_input("number of qubits must lie in [1, 30]");
}

inline cplx ipow(cplx z, int p) {
  cplx r{1.0};
  for (int i = 0; i < p; ++i) r *= z;
  return r;
}

/// Coordinates of (a,b)^{⊗n} in the normalized Dicke basis of S_n.
inline CVector dicke_coords(cplx a, cplx b, int n) {
  CVector v(n + 1);
  for (int m = 0; m <= n; ++m) v(m) = std::sqrt(binomial_d(n, m)) * ipow(a, n - m) * ipow(b, m);
  return v;
}

/// Coordinates of (e*)^{⊗k} ⊗ e^{⊗(n-k)} in S_k ⊗ S_{n-k}; any 0 <= k <= n.
inline CVector split_coords(const ProductVector& e, int n, int k) {
  if (k == 0) return dicke_coords(e.a(), e.b(), n);
  const CVector left = dicke_coords(std::conj(e.a()), std::conj(e.b()), k);
  const CVector right = dicke_coords(e.a(), e.b(), n - k);
  CVector v(left.size() * right.size());
  for (Eigen::Index i = 0; i < left.size(); ++i)
    for (Eigen::Index j = 0; j < right.size(); ++j) v(i * right.size() + j) = left(i) * right(j);
  return v;
}

}  // namespace detail

/// Coordinates of the (partially conjugated) product vector e^{⊗n}.
///
/// With conjugate_first_k == 0 the result has length n+1 with entries
/// sqrt(C(n,m)) a^{n-m} b^m. For k > 0 the first k amplitudes are conjugated and
/// the result lives in the bipartite view basis S_k ⊗ S_{n-k}.
inline CVector product_state_coords(const ProductVector& e, int n, int conjugate_first_k = 0) {
  detail::check_qubits(n);
  if (conjugate_first_k < 0 || conjugate_first_k > n / 2)
    throw invalid_input("product_state_coords: conjugate_first_k outside [0, n/2]");
  return detail::split_coords(e, n, conjugate_first_k);
}

/// A density operator supported on the symmetric subspace, in compressed form.
class SymmetricState {
 public:
  /// Validates Hermiticity, unit trace and positivity; throws invalid_input.
  static SymmetricState from_matrix(int n, CMatrix m) {
    detail::check_qubits(n);
    if (m.rows() != n + 1 || m.cols() != n + 1)
      throw invalid_input("SymmetricState: matrix must be (N+1)x(N+1)");
    if (!m.allFinite()) throw invalid_input("SymmetricState: matrix has non-finite entries");
    if (hermiticity_error(m) > kHermitianTol) throw invalid_input("SymmetricState: matrix is not Hermitian");
    if (std::abs(m.trace() - cplx{1.0}) > kTraceTol) throw invalid_input("SymmetricState: trace is not 1");
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
      throw invalid_input("SymmetricState: matrix is not positive semidefinite");
    return SymmetricState(n, std::move(m));
  }

  /// Hermitizes and rescales to unit trace before validating.
  static SymmetricState normalized(int n, const CMatrix& m) {
    CMatrix h = hermitian_part(m);
    const double tr = h.trace().real();
    if (!(tr > 0)) throw invalid_input("SymmetricState: non-positive trace");
    h /= tr;
    return from_matrix(n, std::move(h));
  }

  /// P_N/(N+1): identity in the compressed representation.
  static SymmetricState maximally_mixed(int n) {
    detail::check_qubits(n);
    return SymmetricState(n, CMatrix::Identity(n + 1, n + 1) / static_cast<double>(n + 1));
  }

  /// Projector onto the normalized product vector e^{⊗n}.
  static SymmetricState product(const ProductVector& e, int n) {
    detail::check_qubits(n);
    const CVector v = detail::dicke_coords(e.a(), e.b(), n).normalized();
    return SymmetricState(n, hermitian_part(v * v.adjoint()));
  }

  /// Projector onto the Dicke state with m excitations.
  static SymmetricState dicke(int n, int m) {
    detail::check_qubits(n);
    if (m < 0 || m > n) throw invalid_input("dicke: excitation number out of range");
    CMatrix r = CMatrix::Zero(n + 1, n + 1);
    r(m, m) = 1.0;
    return SymmetricState(n, std::move(r));
  }

  int n_qubits() const { return n_; }
  int dim() const { return n_ + 1; }
  const CMatrix& matrix() const { return m_; }

 private:
  SymmetricState(int n, CMatrix m) : n_(n), m_(std::move(m)) {}

  int n_;
  CMatrix m_;
};

enum class IsometryVariant {
  /// sqrt(C(N,i) C(N,j) / C(N,n)), binomials over the full register.
  PrintedBinomials,
  /// sqrt(C(k,i) C(N-k,j) / C(N,n)), forced by (B_k ⊗ B_{N-k}) B_N^T.
  SubsystemBinomials,
};

inline const char* to_string(IsometryVariant v) {
  return v == IsometryVariant::PrintedBinomials ? "printed-binomials" : "subsystem-binomials";
}

/// Real isometry from S_N into S_k ⊗ S_{N-k}, validated at construction.
struct CompressionIsometry {
  int n = 0;
  int k = 0;
  RMatrix matrix;  // (k+1)(N-k+1) x (N+1)
  IsometryVariant variant = IsometryVariant::SubsystemBinomials;
  double isometry_error = 0.0;  // max |B^T B - I|

  int rows_dim() const { return k + 1; }
  int cols_dim() const { return n - k + 1; }
  int dim() const { return rows_dim() * cols_dim(); }
};

namespace detail {

inline RMatrix isometry_candidate(int n, int k, IsometryVariant v) {
  const int cols = n - k + 1;
  RMatrix b = RMatrix::Zero((k + 1) * cols, n + 1);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= n - k; ++j) {
      const int m = i + j;
      const double num = v == IsometryVariant::PrintedBinomials ? binomial_d(n, i) * binomial_d(n, j)
                                                                : binomial_d(k, i) * binomial_d(n - k, j);
      b(i * cols + j, m) = std::sqrt(num / binomial_d(n, m));
    }
  return b;
}

/// Tries the printed formula first and keeps whichever variant is an isometry.
/// Accepts any split 0 <= k <= n.
inline CompressionIsometry make_isometry(int n, int k) {
  for (const auto v : {IsometryVariant::PrintedBinomials, IsometryVariant::SubsystemBinomials}) {
    RMatrix b = isometry_candidate(n, k, v);
    const double err = (b.transpose() * b - RMatrix::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff();
    if (err < 1e-12) return CompressionIsometry{n, k, std::move(b), v, err};
  }
  throw internal_error("compression isometry: no candidate entry formula is an isometry");
}

}  // namespace detail

/// The isometry B̃_k carrying S_N into S_k ⊗ S_{N-k}, 1 <= k <= floor(N/2).
inline CompressionIsometry compression_isometry(int n, int k) {
  detail::check_qubits(n);
  if (k < 1 || k > n / 2) throw invalid_input("compression_isometry: k outside [1, N/2]");
  return detail::make_isometry(n, k);
}

/// Transposes the first (rows_dim-dimensional) tensor factor of a square matrix.
inline CMatrix partial_transpose_first(const CMatrix& m, int rows_dim, int cols_dim) {
  CMatrix out(m.rows(), m.cols());
  for (int i = 0; i < rows_dim; ++i)
    for (int ip = 0; ip < rows_dim; ++ip)
      out.block(i * cols_dim, ip * cols_dim, cols_dim, cols_dim) =
          m.block(ip * cols_dim, i * cols_dim, cols_dim, cols_dim);
  return out;
}

/// (B̃ X B̃^T)^{T_k} for any Hermitian operator X in compressed form.
inline CMatrix view_of(const CMatrix& op, const CompressionIsometry& iso) {
  const CMatrix lifted = iso.matrix * op * iso.matrix.transpose();
  return partial_transpose_first(lifted, iso.rows_dim(), iso.cols_dim());
}

/// The partial transposition ρ^{T_k} as a bipartite matrix on S_k ⊗ S_{N-k}.
struct BipartiteView {
  int k = 0;
  int rows_dim = 0;
  int cols_dim = 0;
  CMatrix matrix;
};

inline BipartiteView partial_transpose_view(const SymmetricState& s, int k) {
  const auto iso = compression_isometry(s.n_qubits(), k);
  return BipartiteView{k, iso.rows_dim(), iso.cols_dim(), hermitian_part(view_of(s.matrix(), iso))};
}

/// Embeds a compressed operator into the full 2^N-dimensional space.
///
/// Qubit 1 is the most significant bit of the computational index.
inline CMatrix expand_to_full(int n, const CMatrix& op) {
  detail::check_qubits(n);
  if (n > kMaxFullSpaceQubits) throw invalid_input("expand_to_full: refusing N > 12");
  const std::int64_t full = std::int64_t{1} << n;
  std::vector<int> weight(full);
  std::vector<double> scale(full);
  for (std::int64_t x = 0; x < full; ++x) {
    weight[x] = std::popcount(static_cast<std::uint64_t>(x));
    scale[x] = 1.0 / std::sqrt(binomial_d(n, weight[x]));
  }
  CMatrix out(full, full);
  for (std::int64_t x = 0; x < full; ++x)
    for (std::int64_t y = 0; y < full; ++y) out(x, y) = op(weight[x], weight[y]) * scale[x] * scale[y];
  return out;
}

inline CMatrix expand_to_full(const SymmetricState& s) { return expand_to_full(s.n_qubits(), s.matrix()); }

/// State on C^2 ⊗ S_{floor(N/2)} produced by compressing ceil(N/2) qubits into one.
struct HalfCompressedState {
  int n = 0;           // qubit count of the source symmetric state
  int rest_dim = 0;    // floor(N/2) + 1
  CMatrix matrix;      // 2*rest_dim square, index (b, j) -> b*rest_dim + j
};

/// Linear map sending (1,α)^{⊗N} to (1,α^{ceil(N/2)}) ⊗ (1,α)^{⊗floor(N/2)}.
inline RMatrix half_compression_map(int n) {
  detail::check_qubits(n);
  if (n < 2) throw invalid_input("half compression requires N >= 2");
  const int c = (n + 1) / 2;
  const int f = n / 2;
  RMatrix l = RMatrix::Zero(2 * (f + 1), n + 1);
  for (int b = 0; b <= 1; ++b)
    for (int j = 0; j <= f; ++j) {
      const int m = b * c + j;
      l(b * (f + 1) + j, m) = std::sqrt(binomial_d(f, j) / binomial_d(n, m));
    }
  return l;
}

/// Applies the half-system compression; the result is rescaled to unit trace.
inline HalfCompressedState compress_half(const SymmetricState& s) {
  const RMatrix l = half_compression_map(s.n_qubits());
  CMatrix out = hermitian_part(l * s.matrix() * l.transpose());
  out /= out.trace().real();
  return HalfCompressedState{s.n_qubits(), s.n_qubits() / 2 + 1, std::move(out)};
}

/// Inverse of compress_half through the pseudo-inverse of the compression map.
inline SymmetricState restore_half(const HalfCompressedState& h) {
  const RMatrix l = half_compression_map(h.n);
  const RMatrix pinv = l.completeOrthogonalDecomposition().pseudoInverse();
  return SymmetricState::normalized(h.n, pinv * h.matrix * pinv.transpose());
}

/// Isometries for every relevant partial transposition k = 1..floor(N/2).
///
/// Index 0 denotes the state itself (T_0 is the identity).
class ViewSet {
 public:
  explicit ViewSet(int n) : n_(n) {
    detail::check_qubits(n);
    for (int k = 1; k <= n / 2; ++k) isos_.push_back(compression_isometry(n, k));
  }

  int n() const { return n_; }
  /// Number of nontrivial partial transpositions, floor(N/2).
  int count() const { return static_cast<int>(isos_.size()); }
  const CompressionIsometry& isometry(int k) const { return isos_.at(k - 1); }
  int dim(int k) const { return k == 0 ? n_ + 1 : isos_.at(k - 1).dim(); }
  int rows_dim(int k) const { return k == 0 ? 1 : k + 1; }
  int cols_dim(int k) const { return k == 0 ? n_ + 1 : n_ - k + 1; }

  CMatrix view(const CMatrix& op, int k) const {
    if (k == 0) return op;
    return view_of(op, isos_.at(k - 1));
  }

 private:
  int n_;
  std::vector<CompressionIsometry> isos_;
};

}  // namespace sympt
