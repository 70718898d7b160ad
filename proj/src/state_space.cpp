#include "ismm/state_space.hpp"

#include <algorithm>
#include <cmath>

namespace ismm {

void ReturnBinning::validate() const {
  const int S = states();
  if (S < 3 || S % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "state count must be odd and >= 3");
  if (boundaries.size() != std::size_t(S - 1))
    throw Error(ErrorCode::InvalidArgument, "boundary count must be S-1");
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k)
    if (!(boundaries[k] < boundaries[k + 1]))
      throw Error(ErrorCode::InvalidArgument, "boundaries not increasing");
  for (std::size_t k = 0; k < boundaries.size(); ++k) {
    const double mirror = boundaries[boundaries.size() - 1 - k];
    if (std::abs(boundaries[k] + mirror) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "boundaries not symmetric");
  }
  for (int s = 0; s + 1 < S; ++s)
    if (!(representatives[s] < representatives[s + 1]))
      throw Error(ErrorCode::InvalidArgument, "representatives not increasing");
  if (representatives[S / 2] != 0.0)
    throw Error(ErrorCode::InvalidArgument, "middle representative must be 0");
}

void EmbeddedChain::validate(int state_count,
                             bool allow_self_transitions) const {
  if (states.size() != times.size())
    throw Error(ErrorCode::InvalidArgument, "|J| != |T|");
  for (std::size_t n = 0; n < states.size(); ++n) {
    if (states[n] < 0 || states[n] >= state_count)
      throw Error(ErrorCode::InvalidArgument, "state label out of range");
    if (n > 0 && times[n] <= times[n - 1])
      throw Error(ErrorCode::InvalidArgument, "times not strictly increasing");
    if (n > 0 && !allow_self_transitions && states[n] == states[n - 1])
      throw Error(ErrorCode::InvalidArgument, "self-transition in chain");
  }
}

double quantile_sorted(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 0) throw Error(ErrorCode::InsufficientData, "empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> default_quantile_levels(int state_count) {
  const int k = (state_count - 1) / 2;
  if (k == 1) return {0.60};
  std::vector<double> levels(k);
  for (int i = 0; i < k; ++i)
    levels[i] = 0.60 + (0.95 - 0.60) * double(i) / double(k - 1);
  return levels;
}

ReturnBinning fit_return_bins(const ReturnSeries& returns, int state_count,
                              std::vector<double> quantile_levels) {
  if (state_count < 3 || state_count % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "state count must be odd and >= 3");
  const int half = (state_count - 1) / 2;
  if (quantile_levels.empty()) quantile_levels = default_quantile_levels(state_count);
  if (quantile_levels.size() != std::size_t(half))
    throw Error(ErrorCode::InvalidArgument,
                "need (S-1)/2 quantile levels, got " +
                    std::to_string(quantile_levels.size()));

  const auto flat = returns.concatenated();
  if (!flat.empty()) {
    const auto [lo, hi] = std::minmax_element(flat.begin(), flat.end());
    if (*lo == *hi)
      throw Error(ErrorCode::DegenerateReturns, "all returns equal");
  }

  std::vector<double> abs_nonzero;
  for (double r : flat)
    if (r != 0.0) abs_nonzero.push_back(std::abs(r));

  if (abs_nonzero.size() < std::size_t(10 * state_count))
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(10 * state_count) +
                    " nonzero returns, got " +
                    std::to_string(abs_nonzero.size()));

  std::sort(abs_nonzero.begin(), abs_nonzero.end());

  ReturnBinning bins;
  bins.boundaries.resize(state_count - 1);
  for (int k = 0; k < half; ++k) {
    const double b = quantile_sorted(abs_nonzero, quantile_levels[k]);
    bins.boundaries[std::size_t(half + k)] = b;
    bins.boundaries[std::size_t(half - 1 - k)] = -b;
  }
  for (int k = 0; k + 1 < state_count - 1; ++k) {
    if (!(bins.boundaries[k] < bins.boundaries[k + 1]))
      throw Error(ErrorCode::DegenerateReturns,
                  "quantile boundaries collapse; returns too concentrated");
  }

  // Per-bin empirical means. Empty bins fall back to the bin midpoint (outer
  // bins: boundary extended by half the adjacent bin width).
  std::vector<double> sum(state_count, 0.0);
  std::vector<std::int64_t> cnt(state_count, 0);
  for (double r : flat) {
    const int s = discretize_return(r, bins);
    sum[s] += r;
    ++cnt[s];
  }
  bins.representatives.resize(state_count);
  const auto& b = bins.boundaries;
  for (int s = 0; s < state_count; ++s) {
    if (cnt[s] > 0) {
      bins.representatives[s] = sum[s] / double(cnt[s]);
    } else if (s == 0) {
      bins.representatives[s] = b.front() - 0.5 * (b[1] - b[0]);
    } else if (s == state_count - 1) {
      bins.representatives[s] = b.back() + 0.5 * (b[b.size() - 1] - b[b.size() - 2]);
    } else {
      bins.representatives[s] = 0.5 * (b[s - 1] + b[s]);
    }
  }
  bins.representatives[state_count / 2] = 0.0;
  bins.validate();
  return bins;
}

int discretize_return(double r, const ReturnBinning& bins) {
  // Ties on a boundary go to the bin above it.
  const auto& b = bins.boundaries;
  return static_cast<int>(std::upper_bound(b.begin(), b.end(), r) - b.begin());
}

StateSeries discretize_returns(const ReturnSeries& returns,
                               const ReturnBinning& bins) {
  StateSeries ss;
  ss.days.reserve(returns.days.size());
  for (const auto& day : returns.days) {
    std::vector<int> labels(day.returns.size());
    for (std::size_t t = 0; t < day.returns.size(); ++t)
      labels[t] = discretize_return(day.returns[t], bins);
    ss.days.push_back(std::move(labels));
  }
  return ss;
}

EmbeddedChain extract_embedded_chain(const StateSeries& ss,
                                     TransitionConvention convention) {
  EmbeddedChain chain;
  std::int64_t clock = 0;
  for (const auto& day : ss.days) {
    for (int label : day) {
      if (chain.states.empty() ||
          convention == TransitionConvention::EveryMinute ||
          label != chain.states.back()) {
        chain.states.push_back(label);
        chain.times.push_back(clock);
      }
      ++clock;
    }
  }
  if (chain.states.empty())
    throw Error(ErrorCode::EmptyInput, "no states to embed");
  return chain;
}

std::vector<int> expand_chain_to_labels(const EmbeddedChain& chain,
                                        std::int64_t horizon) {
  if (chain.states.empty())
    throw Error(ErrorCode::EmptyInput, "empty chain");
  std::vector<int> labels;
  labels.reserve(std::size_t(horizon));
  std::size_t n = 0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    while (n + 1 < chain.times.size() && chain.times[n + 1] <= t) ++n;
    labels.push_back(chain.states[n]);
  }
  return labels;
}

std::vector<std::vector<std::int64_t>> transition_histogram(
    const EmbeddedChain& chain, int state_count) {
  std::vector<std::vector<std::int64_t>> counts(
      std::size_t(state_count), std::vector<std::int64_t>(state_count, 0));
  for (std::size_t n = 0; n + 1 < chain.size(); ++n)
    ++counts[std::size_t(chain.states[n])][std::size_t(chain.states[n + 1])];
  return counts;
}

}  // namespace ismm
