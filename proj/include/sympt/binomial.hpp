#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "sympt/errors.hpp"

namespace sympt {

inline constexpr int kMaxQubits = 30;

namespace detail {

using BinomialTable = std::array<std::array<std::uint64_t, kMaxQubits + 1>, kMaxQubits + 1>;

constexpr BinomialTable make_binomial_table() {
  BinomialTable t{};
  for (int n = 0; n <= kMaxQubits; ++n) {
    t[n][0] = 1;
    for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
  }
  return t;
}

inline constexpr BinomialTable kBinomials = make_binomial_table();

}  // namespace detail

/// Exact C(n, k) for 0 <= n <= 30; zero when k is outside [0, n].
constexpr std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > kMaxQubits) throw invalid_input("binomial: n outside [0, 30]");
  if (k < 0 || k > n) return 0;
  return detail::kBinomials[n][k];
}

inline double binomial_d(int n, int k) { return static_cast<double>(binomial(n, k)); }

}  // namespace sympt
