#include "ismm/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace ismm {

namespace {
constexpr std::int64_t kSyntheticVisits = 1'000'000'000'000LL;
}

const char* to_string(Provenance p) {
  return p == Provenance::Direct ? "direct" : "backoff";
}

void KernelMeta::validate() const {
  if (S < 2) throw Error(ErrorCode::InvalidArgument, "S must be >= 2");
  if (V < 1) throw Error(ErrorCode::InvalidArgument, "V must be >= 1");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  if (t_max < 1) throw Error(ErrorCode::InvalidArgument, "t_max must be >= 1");
  if (min_visits < 1)
    throw Error(ErrorCode::InvalidArgument, "min_visits must be >= 1");
  if (int(return_binning.representatives.size()) != S)
    throw Error(ErrorCode::InvalidArgument,
                "return binning does not match S");
  if (index_binning.levels() != V)
    throw Error(ErrorCode::InvalidArgument, "index binning does not match V");
}

std::vector<double> IndexedKernel::sojourn_cdf(int i, int v,
                                               bool backoff_allowed) const {
  const bool direct = visit_count(i, v) > 0;
  if (!direct && !backoff_allowed)
    throw Error(ErrorCode::MissingCell,
                "cell (" + std::to_string(i) + "," + std::to_string(v) +
                    ") never visited");
  if (!direct && backoff_visits[std::size_t(i)] == 0)
    throw Error(ErrorCode::UnreachableState,
                "state " + std::to_string(i) + " never visited");

  std::vector<double> h(std::size_t(meta.t_max), 0.0);
  for (int j = 0; j < meta.S; ++j) {
    const double* row =
        direct ? &q[q_index(i, v, j, 1)]
               : &backoff_q[(std::size_t(i) * meta.S + j) * meta.t_max];
    for (int t = 0; t < meta.t_max; ++t) h[std::size_t(t)] += row[t];
  }
  return h;
}

std::vector<double> IndexedKernel::conditional_wait(int i, int v,
                                                    int j) const {
  std::vector<double> g(std::size_t(meta.t_max), 1.0);
  const double pij = prob(i, v, j);
  if (pij == 0.0) return g;  // G identically 1 when the transition is null
  for (int t = 1; t <= meta.t_max; ++t)
    g[std::size_t(t - 1)] = Q(i, v, j, t) / pij;
  return g;
}

IndexedKernel::Cell IndexedKernel::lookup_with_backoff(
    int i, int v, bool backoff_allowed) const {
  if (visit_count(i, v) >= meta.min_visits ||
      (!backoff_allowed && visit_count(i, v) > 0)) {
    return {&p[p_index(i, v, 0)], &q[q_index(i, v, 0, 1)], Provenance::Direct};
  }
  if (!backoff_allowed)
    throw Error(ErrorCode::MissingCell,
                "cell (" + std::to_string(i) + "," + std::to_string(v) +
                    ") below min_visits and backoff disabled");
  if (backoff_visits[std::size_t(i)] == 0)
    throw Error(ErrorCode::UnreachableState,
                "state " + std::to_string(i) + " never visited");
  return {&backoff_p[std::size_t(i) * meta.S],
          &backoff_q[std::size_t(i) * meta.S * meta.t_max],
          Provenance::Backoff};
}

int IndexedKernel::sample_next_state(const Cell& cell, int S, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (int j = 0; j < S; ++j) {
    if (cell.p[j] <= 0.0) continue;
    last_positive = j;
    cum += cell.p[j];
    if (u < cum) return j;
  }
  if (last_positive < 0)
    throw Error(ErrorCode::MissingCell, "all-zero probability row");
  return last_positive;  // u landed in rounding slack at the top
}

int IndexedKernel::sample_sojourn(const Cell& cell, int j, double u) const {
  const double* row = cell.q + std::size_t(j) * meta.t_max;
  const double target = u * cell.p[j];
  // Smallest t with Q(t) >= target, i.e. G(t) >= u.
  const double* it = std::lower_bound(row, row + meta.t_max, target);
  if (it == row + meta.t_max) return meta.t_max;
  return int(it - row) + 1;
}

std::int64_t IndexedKernel::total_transition_count() const {
  std::int64_t total = 0;
  for (std::int64_t n : visits) total += n;
  return total;
}

void IndexedKernel::check_invariants() const {
  meta.validate();
  const double tol = 1e-12;
  for (int i = 0; i < meta.S; ++i) {
    for (int v = 0; v < meta.V; ++v) {
      if (visit_count(i, v) == 0) continue;
      double row_sum = 0.0;
      for (int j = 0; j < meta.S; ++j) {
        const double pij = prob(i, v, j);
        row_sum += pij;
        double prev = 0.0;
        for (int t = 1; t <= meta.t_max; ++t) {
          const double qt = Q(i, v, j, t);
          if (qt + tol < prev)
            throw Error(ErrorCode::InvalidArgument, "Q not monotone in t");
          prev = qt;
        }
        if (std::abs(Q(i, v, j, meta.t_max) - pij) > tol)
          throw Error(ErrorCode::InvalidArgument, "Q(t_max) != p");
      }
      if (std::abs(row_sum - 1.0) > tol)
        throw Error(ErrorCode::InvalidArgument, "p row does not sum to 1");
      if (meta.convention == TransitionConvention::OnChange &&
          prob(i, v, i) != 0.0)
        throw Error(ErrorCode::InvalidArgument,
                    "self-transition mass under OnChange convention");
    }
  }
  if (!counts.empty()) {
    for (int i = 0; i < meta.S; ++i) {
      for (int v = 0; v < meta.V; ++v) {
        std::int64_t cell_total = 0;
        for (int j = 0; j < meta.S; ++j)
          for (int t = 1; t <= meta.t_max; ++t)
            cell_total += counts[q_index(i, v, j, t)];
        if (cell_total != visit_count(i, v))
          throw Error(ErrorCode::InvalidArgument,
                      "visit count does not reconcile with counts");
      }
    }
  }
}

IndexedKernel estimate_kernel(const EmbeddedChain& chain,
                              std::span<const double> index_values,
                              const KernelMeta& meta) {
  meta.validate();
  const std::int64_t len = std::int64_t(chain.size());
  const std::int64_t burn_in = meta.burn_in();
  if (len <= burn_in + 1)
    throw Error(ErrorCode::InsufficientHistory,
                "chain of " + std::to_string(len) +
                    " transitions cannot cover burn-in " +
                    std::to_string(burn_in));
  if (std::int64_t(index_values.size()) < len)
    throw Error(ErrorCode::InvalidArgument, "index values shorter than chain");

  IndexedKernel k;
  k.meta = meta;
  k.canonical_init.resize(std::size_t(meta.m) + 2);
  for (std::size_t n = 0; n < k.canonical_init.size(); ++n)
    k.canonical_init[n] = {chain.states[n], chain.times[n]};
  const std::size_t cells = std::size_t(meta.S) * meta.V;
  k.counts.assign(cells * meta.S * meta.t_max, 0);
  k.visits.assign(cells, 0);

  for (std::int64_t n = burn_in; n + 1 < len; ++n) {
    const double u = index_values[std::size_t(n)];
    if (!std::isfinite(u))
      throw Error(ErrorCode::InsufficientHistory,
                  "index value missing at transition " + std::to_string(n));
    const int v = discretize_index(u, meta.index_binning);
    const int i = chain.states[std::size_t(n)];
    const int j = chain.states[std::size_t(n + 1)];
    const std::int64_t sojourn =
        chain.times[std::size_t(n + 1)] - chain.times[std::size_t(n)];
    const int t = int(std::min<std::int64_t>(sojourn, meta.t_max));
    ++k.counts[k.q_index(i, v, j, t)];
    ++k.visits[std::size_t(i) * meta.V + v];
  }

  // Normalize to cumulative probabilities.
  k.q.assign(k.counts.size(), 0.0);
  k.p.assign(cells * meta.S, 0.0);
  for (int i = 0; i < meta.S; ++i) {
    for (int v = 0; v < meta.V; ++v) {
      const std::int64_t n_iv = k.visit_count(i, v);
      if (n_iv == 0) continue;
      for (int j = 0; j < meta.S; ++j) {
        std::int64_t running = 0;
        for (int t = 1; t <= meta.t_max; ++t) {
          running += k.counts[k.q_index(i, v, j, t)];
          k.q[k.q_index(i, v, j, t)] = double(running) / double(n_iv);
        }
        k.p[k.p_index(i, v, j)] = double(running) / double(n_iv);
      }
    }
  }

  // v-marginalized backoff tables.
  k.backoff_visits.assign(std::size_t(meta.S), 0);
  k.backoff_q.assign(std::size_t(meta.S) * meta.S * meta.t_max, 0.0);
  k.backoff_p.assign(std::size_t(meta.S) * meta.S, 0.0);
  for (int i = 0; i < meta.S; ++i) {
    std::int64_t n_i = 0;
    for (int v = 0; v < meta.V; ++v) n_i += k.visit_count(i, v);
    k.backoff_visits[std::size_t(i)] = n_i;
    if (n_i == 0) continue;
    for (int j = 0; j < meta.S; ++j) {
      std::int64_t running = 0;
      for (int t = 1; t <= meta.t_max; ++t) {
        for (int v = 0; v < meta.V; ++v)
          running += k.counts[k.q_index(i, v, j, t)];
        k.backoff_q[(std::size_t(i) * meta.S + j) * meta.t_max + (t - 1)] =
            double(running) / double(n_i);
      }
      k.backoff_p[std::size_t(i) * meta.S + j] = double(running) / double(n_i);
    }
  }
  return k;
}

IndexedKernel kernel_from_tables(const KernelMeta& meta,
                                 std::span<const double> p_table,
                                 std::span<const double> g_table) {
  meta.validate();
  const std::size_t cells = std::size_t(meta.S) * meta.V;
  if (p_table.size() != cells * meta.S ||
      g_table.size() != cells * meta.S * meta.t_max)
    throw Error(ErrorCode::InvalidArgument, "table sizes do not match meta");

  IndexedKernel k;
  k.meta = meta;
  k.visits.assign(cells, kSyntheticVisits);
  k.p.assign(p_table.begin(), p_table.end());
  k.q.assign(g_table.size(), 0.0);
  for (int i = 0; i < meta.S; ++i)
    for (int v = 0; v < meta.V; ++v)
      for (int j = 0; j < meta.S; ++j)
        for (int t = 1; t <= meta.t_max; ++t)
          k.q[k.q_index(i, v, j, t)] =
              k.p[k.p_index(i, v, j)] * g_table[k.q_index(i, v, j, t)];

  k.backoff_visits.assign(std::size_t(meta.S), kSyntheticVisits);
  k.backoff_q.assign(std::size_t(meta.S) * meta.S * meta.t_max, 0.0);
  k.backoff_p.assign(std::size_t(meta.S) * meta.S, 0.0);
  for (int i = 0; i < meta.S; ++i) {
    for (int j = 0; j < meta.S; ++j) {
      for (int t = 1; t <= meta.t_max; ++t) {
        double acc = 0.0;
        for (int v = 0; v < meta.V; ++v) acc += k.q[k.q_index(i, v, j, t)];
        k.backoff_q[(std::size_t(i) * meta.S + j) * meta.t_max + (t - 1)] =
            acc / meta.V;
      }
      double acc = 0.0;
      for (int v = 0; v < meta.V; ++v) acc += k.p[k.p_index(i, v, j)];
      k.backoff_p[std::size_t(i) * meta.S + j] = acc / meta.V;
    }
  }
  k.check_invariants();
  return k;
}

std::vector<double> embedded_probs(const IndexedKernel& k) { return k.p; }

}  // namespace ismm
