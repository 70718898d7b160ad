#ifndef ISMM_STATE_SPACE_HPP
#define ISMM_STATE_SPACE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ismm/market_ingest.hpp"

namespace ismm {

// Symmetric discretization of returns into S states (S odd). Boundaries are
// symmetrized quantiles of |r| over nonzero returns; representatives are the
// per-bin empirical means with the middle pinned to exactly zero.
struct ReturnBinning {
  std::vector<double> boundaries;       // S-1, strictly increasing
  std::vector<double> representatives;  // S, monotone increasing

  int states() const { return static_cast<int>(representatives.size()); }
  void validate() const;
};

// Per-minute state labels, day structure preserved (one label per return).
struct StateSeries {
  std::vector<std::vector<int>> days;

  std::size_t total_minutes() const {
    std::size_t n = 0;
    for (const auto& d : days) n += d.size();
    return n;
  }
};

// The (J_n, T_n) sequence: visited states and transition times on the
// concatenated trading-minute clock.
struct EmbeddedChain {
  std::vector<int> states;          // J
  std::vector<std::int64_t> times;  // T, strictly increasing

  std::size_t size() const { return states.size(); }
  void validate(int state_count, bool allow_self_transitions) const;
};

enum class TransitionConvention {
  OnChange,     // a transition only when the state changes (default)
  EveryMinute,  // every minute is a transition (sensitivity analysis)
};

// Sorted-sample quantile with linear interpolation between order statistics
// (R type 7). `sorted` must be non-empty and ascending.
double quantile_sorted(std::span<const double> sorted, double q);

// Default |r|-quantile levels for the positive boundaries: (0.60, 0.95) for
// S=5; other state counts interpolate evenly between those two levels.
std::vector<double> default_quantile_levels(int state_count);

ReturnBinning fit_return_bins(const ReturnSeries& returns, int state_count,
                              std::vector<double> quantile_levels = {});

// Label = index of the bin containing r; a value equal to a boundary belongs
// to the bin above it.
int discretize_return(double r, const ReturnBinning& bins);
StateSeries discretize_returns(const ReturnSeries& returns,
                               const ReturnBinning& bins);

// Minutes are concatenated across days into one integer clock; T_0 is the
// time of the first observation.
EmbeddedChain extract_embedded_chain(
    const StateSeries& ss,
    TransitionConvention convention = TransitionConvention::OnChange);

// Per-minute labels for minutes 0..horizon-1, holding each J_n from T_n to
// T_{n+1}. Inverse of extract_embedded_chain under OnChange.
std::vector<int> expand_chain_to_labels(const EmbeddedChain& chain,
                                        std::int64_t horizon);

// S x S matrix of embedded transition counts (row: from-state).
std::vector<std::vector<std::int64_t>> transition_histogram(
    const EmbeddedChain& chain, int state_count);

}  // namespace ismm

#endif  // ISMM_STATE_SPACE_HPP
