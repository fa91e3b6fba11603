// Searches for an extremal PPT entangled state of N qubits and classifies it.
//
//   find_extremal [N] [seed]

#include <cstdio>
#include <cstdlib>

#include "sympt/classify.hpp"
#include "sympt/extremal.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto tr = sympt::run_to_extremal(n, sympt::run_seed(seed, i));
    std::printf("run %2llu: %zu steps, terminal %s\n", static_cast<unsigned long long>(i), tr.steps.size(),
                tr.terminal_profile.to_string(",").c_str());
    if (!tr.entangled()) continue;

    for (const auto& st : tr.steps) std::printf("  x* = %+.6f  ->  %s\n", st.x_star, st.profile.to_string(",").c_str());
    const auto state = sympt::SymmetricState::normalized(n, tr.terminal);
    const auto a = sympt::assess_state(state);
    std::printf("verdict %s, product vector %s (residual %.2e)", sympt::to_string(a.classification.verdict),
                a.edge.found_vector ? "found" : "none", a.edge.residual);
    if (a.schmidt) std::printf(", Schmidt number <= %d", *a.schmidt);
    std::printf("\n");
    return 0;
  }
  std::printf("no entangled terminal in 100 runs\n");
  return 1;
}
