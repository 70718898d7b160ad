#ifndef ISMM_SIMULATION_HPP
#define ISMM_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ismm/kernel.hpp"
#include "ismm/rng.hpp"

namespace ismm {

// init carries the m+1 seed transitions plus the transition the simulation
// starts from (m+2 pairs in total), mirroring the estimation burn-in. The
// canonical choice is the first m+2 transitions of the estimation chain.
struct SimConfig {
  std::int64_t horizon = 0;  // minutes to emit
  std::uint64_t seed = 0;
  std::vector<TimedState> init;
  bool backoff_allowed = true;
  // Diagnostic: pin the volatility level instead of recomputing it, to
  // measure how much the index feedback contributes.
  std::optional<int> forced_level;

  void validate(const KernelMeta& meta) const;
};

struct SimResult {
  EmbeddedChain chain;                  // init prefix + simulated transitions
  std::vector<int> minute_states;       // horizon entries
  std::vector<double> minute_returns;   // representatives, horizon entries
  std::vector<Provenance> provenance;   // one per simulated transition
  std::size_t simulated_transitions = 0;
};

// Step-by-step simulation: at each transition the index is recomputed from
// the last m+1 simulated sojourns, the next state is drawn from p_i.(v) and
// the sojourn from G_ij(v;.) by inverse CDF. Identical seeds give
// bit-identical results.
SimResult simulate(const IndexedKernel& kernel, const SimConfig& cfg);

// Per-minute states for minutes 0..horizon-1 plus the matching
// representative returns.
std::vector<double> expand_to_minutes(const EmbeddedChain& chain,
                                      std::span<const double> representatives,
                                      std::int64_t horizon,
                                      std::vector<int>* states_out = nullptr);

// First m+2 transitions of a chain, the canonical simulation start.
std::vector<TimedState> chain_prefix(const EmbeddedChain& chain, int m);

// Synthetic stand-in for proprietary market data: a two-regime hidden state
// with per-minute persistence rho (with probability 1-rho the regime is
// redrawn uniformly, so rho=0 is i.i.d.), emitting Gaussian returns whose
// scale depends on the regime. Squared returns are positively autocorrelated
// with decay rate rho.
struct RegimeParams {
  std::int64_t minutes = 0;
  double rho = 0.99;
  double sigma_low = 0.001;
  double sigma_high = 0.005;
  std::int64_t day_length = 0;  // 0: single day, else minutes per day

  void validate() const;
};

ReturnSeries make_regime_benchmark(const RegimeParams& params,
                                   std::uint64_t seed);

}  // namespace ismm

#endif  // ISMM_SIMULATION_HPP
