#pragma once

#include <map>

#include "sympt/extremal.hpp"

namespace fixtures {

/// First extremal entangled terminal of N qubits along the run_seed(seed, i) stream.
inline const sympt::SymmetricState& entangled_terminal(int n, std::uint64_t seed = 1) {
  static std::map<std::pair<int, std::uint64_t>, sympt::SymmetricState> cache;
  const auto key = std::make_pair(n, seed);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  for (std::uint64_t i = 0;; ++i) {
    const auto tr = sympt::run_to_extremal(n, sympt::run_seed(seed, i));
    if (tr.entangled()) return cache.emplace(key, sympt::SymmetricState::normalized(n, tr.terminal)).first->second;
  }
}

}  // namespace fixtures
