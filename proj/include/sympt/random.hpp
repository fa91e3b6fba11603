#pragma once

#include <random>
#include <vector>

#include "sympt/symcore.hpp"

namespace sympt {

template <class Rng>
cplx complex_gaussian(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  return {re, g(rng)};
}

/// Haar-random single-qubit amplitude pair.
template <class Rng>
ProductVector random_product_vector(Rng& rng) {
  for (;;) {
    const cplx a = complex_gaussian(rng);
    const cplx b = complex_gaussian(rng);
    if (std::norm(a) + std::norm(b) > 1e-12) return ProductVector(a, b).normalized();
  }
}

/// G G^† / Tr with G an (N+1) x rank complex Gaussian matrix.
template <class Rng>
SymmetricState random_state(int n, int rank, Rng& rng) {
  if (rank < 1 || rank > n + 1) throw invalid_input("random_state: rank outside [1, N+1]");
  CMatrix g(n + 1, rank);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = complex_gaussian(rng);
  return SymmetricState::normalized(n, g * g.adjoint());
}

template <class Rng>
SymmetricState random_state(int n, Rng& rng) {
  std::uniform_int_distribution<int> r(1, n + 1);
  return random_state(n, r(rng), rng);
}

struct ProductMixture {
  std::vector<double> weights;
  std::vector<ProductVector> vectors;
  SymmetricState state;
};

/// Random convex combination of `terms` symmetric product projectors.
template <class Rng>
ProductMixture random_separable_mixture(int n, int terms, Rng& rng) {
  if (terms < 1) throw invalid_input("random_separable_mixture: need at least one term");
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(terms);
  std::vector<ProductVector> e;
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    w[t] = u(rng);
    total += w[t];
    e.push_back(random_product_vector(rng));
  }
  CMatrix m = CMatrix::Zero(n + 1, n + 1);
  for (int t = 0; t < terms; ++t) {
    w[t] /= total;
    const CVector v = product_state_coords(e[t], n);
    m += w[t] * (v * v.adjoint());
  }
  return {std::move(w), std::move(e), SymmetricState::normalized(n, m)};
}

}  // namespace sympt
