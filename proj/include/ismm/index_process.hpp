#ifndef ISMM_INDEX_PROCESS_HPP
#define ISMM_INDEX_PROCESS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ismm/state_space.hpp"

namespace ismm {

struct TimedState {
  int state;
  std::int64_t time;
};

enum class RewardMode {
  SquaredRepresentative,  // f(state) = representative(state)^2
};

// Parameters of the memory index U_n^m: a duration-weighted moving average of
// f over the last m+1 sojourns. seed_history optionally supplies the m+1
// transitions before the chain's first entry so early indices are defined.
struct IndexParams {
  int m = 1;
  RewardMode f_mode = RewardMode::SquaredRepresentative;
  std::vector<double> representatives;
  std::vector<TimedState> seed_history;

  double f(int state) const {
    const double r = representatives[std::size_t(state)];
    return r * r;
  }
  void validate() const;
};

// Volatility levels: V-1 boundaries at empirical quantiles k/V.
struct IndexBinning {
  std::vector<double> boundaries;

  int levels() const { return static_cast<int>(boundaries.size()) + 1; }
  void validate() const;
};

// U at transition n: the average of f over the sojourns ending at
// T_{n-m}..T_n, weighted by sojourn length, normalized by T_n - T_{n-(m+1)}.
// Requires entries n-(m+1)..n, drawing from seed_history below index 0.
double index_at_transition(const EmbeddedChain& chain, std::int64_t n,
                           const IndexParams& params);

// U at an arbitrary minute t >= T_0; coincides with index_at_transition when
// t is a transition time. The ongoing sojourn counts with its elapsed
// duration.
double index_at_time(const EmbeddedChain& chain, std::int64_t t,
                     const IndexParams& params);

// U_n for every transition of the chain; entries below the burn-in (m+1 when
// there is no seed history) are NaN. Single pass, O(1) amortized per step.
std::vector<double> compute_transition_indices(const EmbeddedChain& chain,
                                               const IndexParams& params);

IndexBinning fit_index_bins(std::span<const double> values, int level_count);

// Level = count of boundaries at or below u; a value on a boundary belongs to
// the level above it.
int discretize_index(double u, const IndexBinning& bins);

}  // namespace ismm

#endif  // ISMM_INDEX_PROCESS_HPP
