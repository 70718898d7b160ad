#include "ismm/renewal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "ismm/simulation.hpp"

namespace ismm {

namespace {

// History + remaining horizon; target and cap are fixed per query.
struct MemoKey {
  std::array<std::int8_t, kPhiMaxMemory + 2> states;
  std::array<std::int32_t, kPhiMaxMemory + 2> times;
  std::int32_t horizon;

  bool operator<(const MemoKey& other) const {
    if (states != other.states) return states < other.states;
    if (times != other.times) return times < other.times;
    return horizon < other.horizon;
  }
};

class PhiSolver {
 public:
  PhiSolver(const IndexedKernel& kernel, int target, double v_cap)
      : k_(kernel),
        m_(kernel.meta.m),
        target_(target),
        v_cap_(v_cap) {}

  double solve(const std::vector<int>& states,
               const std::vector<std::int64_t>& times, int horizon) {
    MemoKey key{};
    key.states.fill(-1);
    key.times.fill(0);
    for (std::size_t i = 0; i < states.size(); ++i) {
      key.states[i] = std::int8_t(states[i]);
      key.times[i] = std::int32_t(times[i]);
    }
    key.horizon = horizon;
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;

    const double value = evaluate(states, times, horizon);
    memo_.emplace(key, value);
    return value;
  }

 private:
  double f(int s) const {
    const double r = k_.meta.return_binning.representatives[std::size_t(s)];
    return r * r;
  }

  // U at the current transition (time 0), from the m+1 completed sojourns.
  double index_at_origin(const std::vector<int>& states,
                         const std::vector<std::int64_t>& times) const {
    std::vector<std::int64_t> dur(std::size_t(k_.meta.S), 0);
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
      dur[std::size_t(states[k])] += times[k + 1] - times[k];
    double acc = 0.0;
    for (std::size_t s = 0; s < dur.size(); ++s)
      if (dur[s] != 0) acc += f(int(s)) * double(dur[s]);
    return acc / double(-times.front());
  }

  // U at horizon t given no jump occurred: the ongoing sojourn in i_0
  // contributes its elapsed time t, the window shifts by one transition.
  double index_no_jump(const std::vector<int>& states,
                       const std::vector<std::int64_t>& times,
                       int horizon) const {
    std::vector<std::int64_t> dur(std::size_t(k_.meta.S), 0);
    const std::size_t last = states.size() - 1;  // i_0 at time 0
    dur[std::size_t(states[last])] += horizon;
    for (std::size_t k = 1; k <= std::size_t(m_); ++k) {
      // Sojourn entered at t_{-k}, left at t_{1-k} (both <= 0 < horizon).
      const std::int64_t upper =
          std::min<std::int64_t>(horizon, times[last - k + 1]);
      dur[std::size_t(states[last - k])] += upper - times[last - k];
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < dur.size(); ++s)
      if (dur[s] != 0) acc += f(int(s)) * double(dur[s]);
    return acc / double(horizon - times[last - std::size_t(m_)]);
  }

  double evaluate(const std::vector<int>& states,
                  const std::vector<std::int64_t>& times, int horizon) {
    const int i0 = states.back();
    const double u0 = index_at_origin(states, times);

    if (horizon == 0)
      return (i0 == target_ && u0 <= v_cap_) ? 1.0 : 0.0;

    const int level = discretize_index(u0, k_.meta.index_binning);
    const auto cell = k_.lookup_with_backoff(i0, level);
    const int t_max = k_.meta.t_max;

    double value = 0.0;
    if (i0 == target_) {
      double h_t = 0.0;  // H(u0; horizon) from the cell's cumulative rows
      const int t_eff = std::min(horizon, t_max);
      for (int j = 0; j < k_.meta.S; ++j)
        h_t += cell.q[std::size_t(j) * t_max + (t_eff - 1)];
      const double survival = 1.0 - h_t;
      if (survival > 0.0 && index_no_jump(states, times, horizon) <= v_cap_)
        value += survival;
    }

    // First jump to state s at time dt, then the shifted subproblem.
    std::vector<int> next_states(states.begin() + 1, states.end());
    next_states.push_back(0);
    std::vector<std::int64_t> next_times(times.size());
    for (int dt = 1; dt <= std::min(horizon, t_max); ++dt) {
      for (std::size_t k = 0; k + 1 < times.size(); ++k)
        next_times[k] = times[k + 1] - dt;
      next_times.back() = 0;
      for (int s = 0; s < k_.meta.S; ++s) {
        const double* row = cell.q + std::size_t(s) * t_max;
        const double mass = row[dt - 1] - (dt >= 2 ? row[dt - 2] : 0.0);
        if (mass <= 0.0) continue;
        next_states.back() = s;
        value += mass * solve(next_states, next_times, horizon - dt);
      }
    }
    return value;
  }

  const IndexedKernel& k_;
  int m_;
  int target_;
  double v_cap_;
  std::map<MemoKey, double> memo_;
};

void validate_query(const IndexedKernel& kernel, const PhiQuery& query) {
  const KernelMeta& meta = kernel.meta;
  if (meta.m > kPhiMaxMemory || meta.S > kPhiMaxStates ||
      query.horizon > kPhiMaxHorizon)
    throw Error(ErrorCode::EnvelopeExceeded,
                "solver supports m <= " + std::to_string(kPhiMaxMemory) +
                    ", S <= " + std::to_string(kPhiMaxStates) +
                    ", t <= " + std::to_string(kPhiMaxHorizon));
  if (query.horizon < 0)
    throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
  if (query.states.size() != std::size_t(meta.m) + 2 ||
      query.times.size() != query.states.size())
    throw Error(ErrorCode::InvalidArgument,
                "history must hold m+2 states and times");
  if (query.times.back() != 0)
    throw Error(ErrorCode::InvalidArgument, "history must end at time 0");
  for (std::size_t k = 0; k < query.states.size(); ++k) {
    if (query.states[k] < 0 || query.states[k] >= meta.S)
      throw Error(ErrorCode::InvalidArgument, "history state out of range");
    if (k > 0 && query.times[k] <= query.times[k - 1])
      throw Error(ErrorCode::InvalidArgument,
                  "history times not strictly increasing");
  }
  if (query.target < 0 || query.target >= meta.S)
    throw Error(ErrorCode::InvalidArgument, "target state out of range");
}

}  // namespace

double solve_phi(const IndexedKernel& kernel, const PhiQuery& query) {
  validate_query(kernel, query);
  PhiSolver solver(kernel, query.target, query.v_cap);
  const double value =
      solver.solve(query.states, query.times, query.horizon);
  return std::clamp(value, 0.0, 1.0);
}

double phi_marginal(const IndexedKernel& kernel, PhiQuery query) {
  query.v_cap = std::numeric_limits<double>::infinity();
  return solve_phi(kernel, query);
}

double monte_carlo_phi(const IndexedKernel& kernel, const PhiQuery& query,
                       int replications, std::uint64_t seed, double* se_out) {
  validate_query(kernel, query);
  if (replications < 1)
    throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");

  IndexParams params;
  params.m = kernel.meta.m;
  params.representatives = kernel.meta.return_binning.representatives;

  SimConfig cfg;
  cfg.horizon = std::max(query.horizon, 1);
  for (std::size_t k = 0; k < query.states.size(); ++k)
    cfg.init.push_back({query.states[k], query.times[k]});

  std::int64_t hits = 0;
  for (int r = 0; r < replications; ++r) {
    cfg.seed = substream_seed(seed, std::uint64_t(r));
    const SimResult sim = simulate(kernel, cfg);
    const auto& times = sim.chain.times;
    const auto it = std::upper_bound(times.begin(), times.end(),
                                     std::int64_t(query.horizon));
    const int z = sim.chain.states[std::size_t(it - times.begin()) - 1];
    if (z != query.target) continue;
    if (index_at_time(sim.chain, query.horizon, params) <= query.v_cap)
      ++hits;
  }
  const double p = double(hits) / double(replications);
  if (se_out)
    *se_out =
        std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(replications));
  return p;
}

IndexedKernel phi_toy_kernel() {
  KernelMeta meta;
  meta.S = 2;
  meta.V = 2;
  meta.m = 1;
  meta.t_max = 6;
  meta.return_binning.representatives = {-0.01, 0.02};
  meta.return_binning.boundaries = {0.005};
  meta.index_binning.boundaries = {2.0e-4};

  std::vector<double> p(2 * 2 * 2, 0.0);
  const auto P = [&](int i, int v, int j) -> double& {
    return p[std::size_t((i * 2 + v) * 2 + j)];
  };
  P(0, 0, 1) = 1.0;
  P(0, 1, 1) = 1.0;
  P(1, 0, 0) = 1.0;
  P(1, 1, 0) = 1.0;

  std::vector<double> g(p.size() * 6, 1.0);
  const auto set_curve = [&](int i, int v, int j,
                             std::initializer_list<double> cdf) {
    int t = 1;
    for (double value : cdf)
      g[std::size_t(((i * 2 + v) * 2 + j) * 6 + (t++ - 1))] = value;
  };
  set_curve(0, 0, 1, {0.5, 0.8, 0.9, 1.0, 1.0, 1.0});  // calm: short stays
  set_curve(0, 1, 1, {0.1, 0.3, 0.5, 0.7, 0.9, 1.0});  // excited: longer
  set_curve(1, 0, 0, {0.6, 0.9, 1.0, 1.0, 1.0, 1.0});
  set_curve(1, 1, 0, {0.2, 0.4, 0.6, 0.8, 0.9, 1.0});
  return kernel_from_tables(meta, p, g);
}

std::vector<PhiGridRow> phi_comparison_grid(const IndexedKernel& kernel,
                                            int replications,
                                            std::uint64_t seed) {
  const double inf = std::numeric_limits<double>::infinity();
  struct Spec {
    int horizon;
    int target;
    double v_cap;
  };
  const std::vector<Spec> specs = {
      {5, 0, inf},     {5, 1, inf},    {10, 0, inf},    {10, 1, inf},
      {20, 0, inf},    {20, 1, inf},   {10, 0, 2.0e-4}, {10, 1, 2.0e-4},
      {20, 0, 3.5e-4}, {20, 1, 3.5e-4}};

  std::vector<PhiGridRow> rows;
  rows.reserve(specs.size());
  for (std::size_t id = 0; id < specs.size(); ++id) {
    PhiGridRow row;
    row.id = int(id);
    row.query.states = {0, 1, 0};
    row.query.times = {-5, -2, 0};
    row.query.target = specs[id].target;
    row.query.horizon = specs[id].horizon;
    row.query.v_cap = specs[id].v_cap;
    row.phi = solve_phi(kernel, row.query);
    row.mc = monte_carlo_phi(kernel, row.query, replications,
                             substream_seed(seed, id), &row.mc_se);
    row.pass = std::abs(row.phi - row.mc) <= 3.0 * row.mc_se + 1e-9;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ismm
