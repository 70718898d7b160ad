#include "ismm/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace ismm {

void SimConfig::validate(const KernelMeta& meta) const {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
  if (std::int64_t(init.size()) != meta.m + 2)
    throw Error(ErrorCode::InsufficientHistory,
                "init needs m+2 = " + std::to_string(meta.m + 2) +
                    " pairs, got " + std::to_string(init.size()));
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (init[k].state < 0 || init[k].state >= meta.S)
      throw Error(ErrorCode::InvalidArgument, "init state out of range");
    if (k > 0 && init[k].time <= init[k - 1].time)
      throw Error(ErrorCode::InvalidArgument,
                  "init times not strictly increasing");
  }
  if (forced_level && (*forced_level < 0 || *forced_level >= meta.V))
    throw Error(ErrorCode::InvalidArgument, "forced level out of range");
}

SimResult simulate(const IndexedKernel& kernel, const SimConfig& cfg) {
  const KernelMeta& meta = kernel.meta;
  meta.validate();
  cfg.validate(meta);

  const int m = meta.m;
  const auto& reps = meta.return_binning.representatives;
  const auto f = [&](int s) {
    const double r = reps[std::size_t(s)];
    return r * r;
  };

  SimResult result;
  auto& chain = result.chain;
  chain.states.reserve(std::size_t(cfg.horizon) / 2 + cfg.init.size());
  chain.times.reserve(chain.states.capacity());
  for (const auto& ts : cfg.init) {
    chain.states.push_back(ts.state);
    chain.times.push_back(ts.time);
  }

  // Rolling per-state duration buckets over the m+1 most recent sojourns,
  // identical bucketing to index_at_transition so indices match bit for bit.
  std::vector<std::int64_t> dur(std::size_t(meta.S), 0);
  for (std::size_t k = 0; k + 1 < cfg.init.size(); ++k)
    dur[std::size_t(cfg.init[k].state)] +=
        cfg.init[k + 1].time - cfg.init[k].time;

  Rng rng(cfg.seed);
  while (chain.times.back() < cfg.horizon) {
    const std::size_t n = chain.size() - 1;
    const std::int64_t denom =
        chain.times[n] - chain.times[n - std::size_t(m) - 1];
    double index_value = 0.0;
    for (int s = 0; s < meta.S; ++s)
      if (dur[std::size_t(s)] != 0)
        index_value += f(s) * double(dur[std::size_t(s)]);
    index_value /= double(denom);

    const int level = cfg.forced_level
                          ? *cfg.forced_level
                          : discretize_index(index_value, meta.index_binning);

    const int i = chain.states[n];
    const auto cell = kernel.lookup_with_backoff(i, level, cfg.backoff_allowed);
    const int j =
        IndexedKernel::sample_next_state(cell, meta.S, rng.next_double());
    const int sojourn = kernel.sample_sojourn(cell, j, rng.next_double());

    // Advance the rolling window: the oldest sojourn leaves, the one just
    // completed (state i, length `sojourn`) enters.
    const std::size_t drop = n - std::size_t(m) - 1;
    dur[std::size_t(chain.states[drop])] -=
        chain.times[drop + 1] - chain.times[drop];
    dur[std::size_t(i)] += sojourn;

    chain.states.push_back(j);
    chain.times.push_back(chain.times[n] + sojourn);
    result.provenance.push_back(cell.tag);
    ++result.simulated_transitions;
  }

  result.minute_returns =
      expand_to_minutes(chain, reps, cfg.horizon, &result.minute_states);
  return result;
}

std::vector<double> expand_to_minutes(const EmbeddedChain& chain,
                                      std::span<const double> representatives,
                                      std::int64_t horizon,
                                      std::vector<int>* states_out) {
  const auto labels = expand_chain_to_labels(chain, horizon);
  std::vector<double> returns(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t)
    returns[t] = representatives[std::size_t(labels[t])];
  if (states_out) *states_out = labels;
  return returns;
}

std::vector<TimedState> chain_prefix(const EmbeddedChain& chain, int m) {
  if (chain.size() < std::size_t(m) + 2)
    throw Error(ErrorCode::InsufficientHistory,
                "chain shorter than m+2 transitions");
  std::vector<TimedState> init(std::size_t(m) + 2);
  for (std::size_t k = 0; k < init.size(); ++k)
    init[k] = {chain.states[k], chain.times[k]};
  return init;
}

void RegimeParams::validate() const {
  if (minutes < 1) throw Error(ErrorCode::InvalidArgument, "minutes must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho must lie in [0,1)");
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sigmas must be positive");
  if (day_length < 0)
    throw Error(ErrorCode::InvalidArgument, "day_length must be >= 0");
}

ReturnSeries make_regime_benchmark(const RegimeParams& params,
                                   std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  const double sigma[2] = {params.sigma_low, params.sigma_high};
  int regime = rng.next_double() < 0.5 ? 0 : 1;

  const std::int64_t day_len =
      params.day_length > 0 ? params.day_length : params.minutes;

  ReturnSeries series;
  series.instrument = "regime-benchmark";
  std::int64_t emitted = 0;
  DayNumber date = make_day(2007, 1, 2);
  while (emitted < params.minutes) {
    ReturnDay day;
    day.date = date++;
    const std::int64_t n = std::min(day_len, params.minutes - emitted);
    day.returns.resize(std::size_t(n));
    for (std::int64_t t = 0; t < n; ++t) {
      if (rng.next_double() >= params.rho)
        regime = rng.next_double() < 0.5 ? 0 : 1;
      day.returns[std::size_t(t)] = sigma[regime] * rng.next_normal();
    }
    emitted += n;
    series.days.push_back(std::move(day));
  }
  return series;
}

}  // namespace ismm
