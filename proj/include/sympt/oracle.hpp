#pragma once

// Brute-force reference computations in the full 2^N-dimensional space, used to
// cross-check the compressed views.

#include <bit>
#include <cstdint>
#include <random>

#include "sympt/random.hpp"
#include "sympt/spectra.hpp"
#include "sympt/symcore.hpp"

namespace sympt::oracle {

/// Literal partial transpose of the first k qubits (the most significant bits).
inline CMatrix partial_transpose_qubits(const CMatrix& full, int n, int k) {
  const std::int64_t dim = std::int64_t{1} << n;
  if (full.rows() != dim || full.cols() != dim) throw invalid_input("partial_transpose_qubits: wrong dimension");
  const int low = n - k;
  const std::int64_t low_mask = (std::int64_t{1} << low) - 1;
  CMatrix out(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x)
    for (std::int64_t y = 0; y < dim; ++y) {
      const std::int64_t xs = ((y >> low) << low) | (x & low_mask);
      const std::int64_t ys = ((x >> low) << low) | (y & low_mask);
      out(xs, ys) = full(x, y);
    }
  return out;
}

/// Columns |Ẽ_i^k⟩ ⊗ |Ẽ_j^{N-k}⟩ written in the computational basis, ordered (i, j).
inline CMatrix bipartite_dicke_basis(int n, int k) {
  const std::int64_t dim = std::int64_t{1} << n;
  const int low = n - k;
  const int cols_dim = n - k + 1;
  CMatrix w = CMatrix::Zero(dim, static_cast<Eigen::Index>(k + 1) * cols_dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    const int i = std::popcount(static_cast<std::uint64_t>(x >> low));
    const int j = std::popcount(static_cast<std::uint64_t>(x & ((std::int64_t{1} << low) - 1)));
    w(x, i * cols_dim + j) = 1.0 / std::sqrt(binomial_d(k, i) * binomial_d(low, j));
  }
  return w;
}

/// expand_to_full, literal partial transpose, restriction to S_k ⊗ S_{N-k}.
inline CMatrix view(const SymmetricState& s, int k) {
  const int n = s.n_qubits();
  const CMatrix full = expand_to_full(s);
  const CMatrix pt = k == 0 ? full : partial_transpose_qubits(full, n, k);
  const CMatrix w = bipartite_dicke_basis(n, k);
  return w.adjoint() * pt * w;
}

/// Ranks of ρ and of every literal partial transpose in the full space.
inline RankProfile rank_profile(const SymmetricState& s, double rel_tol = kDefaultRankTol) {
  const int n = s.n_qubits();
  const CMatrix full = expand_to_full(s);
  RankProfile p;
  for (int k = 0; k <= n / 2; ++k) {
    const CMatrix m = k == 0 ? full : partial_transpose_qubits(full, n, k);
    p.ranks.push_back(numerical_rank(m, rel_tol));
  }
  return p;
}

struct CheckReport {
  int n = 0;
  int states = 0;
  double max_view_error = 0.0;
  int profile_mismatches = 0;

  bool passed(double tol = 1e-10) const { return max_view_error <= tol && profile_mismatches == 0; }
};

/// Compares compressed views and rank profiles with the full-space computation
/// on `states` random PSD symmetric states of random rank.
inline CheckReport check(int n, int states, std::uint64_t seed, double rel_tol = kDefaultRankTol) {
  if (n < 2 || n > 8) throw invalid_input("oracle::check: N outside [2, 8]");
  std::mt19937_64 rng(seed);
  const ViewSet views(n);
  CheckReport r{n, states, 0.0, 0};
  for (int t = 0; t < states; ++t) {
    const SymmetricState s = random_state(n, rng);
    const CMatrix full = expand_to_full(s);
    RankProfile brute;
    for (int k = 0; k <= n / 2; ++k) {
      const CMatrix pt = k == 0 ? full : partial_transpose_qubits(full, n, k);
      const CMatrix w = bipartite_dicke_basis(n, k);
      const CMatrix restricted = w.adjoint() * pt * w;
      r.max_view_error = std::max(r.max_view_error, (restricted - views.view(s.matrix(), k)).cwiseAbs().maxCoeff());
      brute.ranks.push_back(numerical_rank(pt, rel_tol));
    }
    if (brute != profile_of(view_spectra(views, s.matrix(), rel_tol))) ++r.profile_mismatches;
  }
  return r;
}

}  // namespace sympt::oracle
