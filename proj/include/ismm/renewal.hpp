#ifndef ISMM_RENEWAL_HPP
#define ISMM_RENEWAL_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "ismm/kernel.hpp"

namespace ismm {

// Query for the transition probability function phi: the probability that,
// starting from a known (m+2)-transition history ending at time 0, the
// process sits in `target` at horizon `t` with index value at most `v_cap`.
struct PhiQuery {
  std::vector<int> states;           // m+2 entries, i_{-(m+1)}..i_0
  std::vector<std::int64_t> times;   // m+2 entries, increasing, last is 0
  int target = 0;                    // j
  int horizon = 1;                   // t, integer minutes
  double v_cap = std::numeric_limits<double>::infinity();
};

// Tractability envelope for the recursive solver; the module is an oracle
// for the simulation engine, not a production solver.
constexpr int kPhiMaxMemory = 2;
constexpr int kPhiMaxStates = 3;
constexpr int kPhiMaxHorizon = 50;

// Evaluates the renewal-type recursion: a no-jump term (survival in i_0 with
// the index-at-t indicator) plus first-jump terms summed over target states
// and integer jump times, memoized per query. Index arguments are snapped to
// the kernel's levels with the same lookup the simulator uses.
double solve_phi(const IndexedKernel& kernel, const PhiQuery& query);

// P[Z(t) = target | history]: solve_phi with the index cap at infinity.
// Summing over target in 0..S-1 yields 1.
double phi_marginal(const IndexedKernel& kernel, PhiQuery query);

// Monte Carlo estimate of the same probability from the simulation engine;
// the solver's independent cross-check. se_out receives the binomial
// standard error.
double monte_carlo_phi(const IndexedKernel& kernel, const PhiQuery& query,
                       int replications, std::uint64_t seed,
                       double* se_out = nullptr);

// Two states, two volatility levels, m=1: the stock kernel behind the
// solver-vs-simulator comparison grid.
IndexedKernel phi_toy_kernel();

struct PhiGridRow {
  int id;
  PhiQuery query;
  double phi;
  double mc;
  double mc_se;
  bool pass;  // |phi - mc| <= 3 mc_se
};

// Ten queries over horizons, targets and index caps on `kernel`; each row
// compares solve_phi with the Monte Carlo estimate at 3 standard errors.
std::vector<PhiGridRow> phi_comparison_grid(const IndexedKernel& kernel,
                                            int replications,
                                            std::uint64_t seed);

}  // namespace ismm

#endif  // ISMM_RENEWAL_HPP
