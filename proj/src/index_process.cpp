#include "ismm/index_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ismm {

namespace {

// Accessor over the virtual sequence seed_history ++ chain. Virtual index v
// in [-(seed size), chain size).
struct HistoryView {
  const EmbeddedChain& chain;
  const std::vector<TimedState>& seed;

  std::int64_t lo() const { return -static_cast<std::int64_t>(seed.size()); }
  std::int64_t hi() const { return static_cast<std::int64_t>(chain.size()); }

  int state(std::int64_t v) const {
    return v >= 0 ? chain.states[std::size_t(v)]
                  : seed[std::size_t(v - lo())].state;
  }
  std::int64_t time(std::int64_t v) const {
    return v >= 0 ? chain.times[std::size_t(v)]
                  : seed[std::size_t(v - lo())].time;
  }
};

void require_history(std::int64_t needed_lo, std::int64_t lo,
                     std::int64_t needed, std::int64_t available) {
  if (needed_lo < lo) {
    throw Error(ErrorCode::InsufficientHistory,
                "need " + std::to_string(needed) + " entries, have " +
                    std::to_string(available));
  }
}

// All index evaluations reduce the window to per-state duration totals and
// sum f(s)*dur(s) in ascending state order, so every code path (one-shot,
// rolling, and the in-time variant) produces bit-identical values.
double index_from_buckets(std::span<const std::int64_t> dur,
                          const IndexParams& params, std::int64_t denom) {
  double acc = 0.0;
  for (std::size_t s = 0; s < dur.size(); ++s)
    if (dur[s] != 0) acc += params.f(int(s)) * double(dur[s]);
  return acc / double(denom);
}

}  // namespace

void IndexParams::validate() const {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  if (representatives.empty())
    throw Error(ErrorCode::InvalidArgument, "representatives missing");
  for (std::size_t k = 1; k < seed_history.size(); ++k)
    if (seed_history[k].time <= seed_history[k - 1].time)
      throw Error(ErrorCode::InvalidArgument, "seed times not increasing");
}

void IndexBinning::validate() const {
  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k)
    if (!(boundaries[k] < boundaries[k + 1]))
      throw Error(ErrorCode::DegenerateIndex,
                  "index boundaries not strictly increasing");
}

double index_at_transition(const EmbeddedChain& chain, std::int64_t n,
                           const IndexParams& params) {
  params.validate();
  const HistoryView view{chain, params.seed_history};
  const std::int64_t first = n - (params.m + 1);
  if (n >= view.hi())
    throw Error(ErrorCode::InvalidArgument, "transition index out of range");
  require_history(first, view.lo(), params.m + 2, n - view.lo() + 1);

  std::vector<std::int64_t> dur(params.representatives.size(), 0);
  for (std::int64_t k = first; k < n; ++k)
    dur[std::size_t(view.state(k))] += view.time(k + 1) - view.time(k);
  return index_from_buckets(dur, params, view.time(n) - view.time(first));
}

double index_at_time(const EmbeddedChain& chain, std::int64_t t,
                     const IndexParams& params) {
  params.validate();
  const HistoryView view{chain, params.seed_history};
  if (chain.times.empty() || t < chain.times.front())
    throw Error(ErrorCode::InvalidArgument, "t before first transition");

  // N(t) = sup{n : T_n <= t}; theta = 1 iff t is a transition time.
  const auto it =
      std::upper_bound(chain.times.begin(), chain.times.end(), t);
  const std::int64_t n_t = std::int64_t(it - chain.times.begin()) - 1;
  const int theta = chain.times[std::size_t(n_t)] == t ? 1 : 0;
  const std::int64_t base = n_t - theta;

  const std::int64_t first = base - params.m;
  require_history(first, view.lo(), params.m + 2, base - view.lo() + 2);

  // Sojourns starting at base-m..base; the one in progress at `base` is cut
  // at t (for theta=1 its end T_{base+1} equals t, so no special case).
  std::vector<std::int64_t> dur(params.representatives.size(), 0);
  for (std::int64_t k = first; k <= base; ++k) {
    const std::int64_t upper = (k == base) ? t : std::min(t, view.time(k + 1));
    dur[std::size_t(view.state(k))] += upper - view.time(k);
  }
  return index_from_buckets(dur, params, t - view.time(first));
}

std::vector<double> compute_transition_indices(const EmbeddedChain& chain,
                                               const IndexParams& params) {
  params.validate();
  const HistoryView view{chain, params.seed_history};
  const std::int64_t len = view.hi();
  std::vector<double> out(std::size_t(len),
                          std::numeric_limits<double>::quiet_NaN());

  const std::int64_t start =
      std::max<std::int64_t>(view.lo() + params.m + 1, 0);
  if (start >= len) return out;

  // Rolling per-state duration buckets over the m+1 most recent sojourns.
  std::vector<std::int64_t> dur(params.representatives.size(), 0);
  for (std::int64_t k = start - (params.m + 1); k < start; ++k)
    dur[std::size_t(view.state(k))] += view.time(k + 1) - view.time(k);

  for (std::int64_t n = start;; ++n) {
    out[std::size_t(n)] = index_from_buckets(
        dur, params, view.time(n) - view.time(n - params.m - 1));
    if (n + 1 >= len) break;
    const std::int64_t drop = n - params.m - 1;
    dur[std::size_t(view.state(drop))] -= view.time(drop + 1) - view.time(drop);
    dur[std::size_t(view.state(n))] += view.time(n + 1) - view.time(n);
  }
  return out;
}

IndexBinning fit_index_bins(std::span<const double> values, int level_count) {
  if (level_count < 1)
    throw Error(ErrorCode::InvalidArgument, "level count must be >= 1");
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.size() < std::size_t(10 * level_count))
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(10 * level_count) +
                    " index values, got " + std::to_string(finite.size()));
  IndexBinning bins;
  if (level_count == 1) return bins;  // a single level needs no boundaries

  std::sort(finite.begin(), finite.end());
  if (finite.front() == finite.back())
    throw Error(ErrorCode::DegenerateIndex, "all index values identical");

  bins.boundaries.resize(std::size_t(level_count - 1));
  for (int k = 1; k < level_count; ++k)
    bins.boundaries[std::size_t(k - 1)] =
        quantile_sorted(finite, double(k) / double(level_count));
  bins.validate();
  return bins;
}

int discretize_index(double u, const IndexBinning& bins) {
  const auto& b = bins.boundaries;
  return static_cast<int>(std::upper_bound(b.begin(), b.end(), u) - b.begin());
}

}  // namespace ismm
