#ifndef ISMM_KERNEL_HPP
#define ISMM_KERNEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ismm/index_process.hpp"
#include "ismm/state_space.hpp"

namespace ismm {

enum class Provenance { Direct, Backoff };

const char* to_string(Provenance p);

// Everything needed to interpret (and re-run) a kernel: dimensions, the
// binnings that define states and volatility levels, and estimation options.
struct KernelMeta {
  int S = 5;
  int V = 5;
  int m = 1;
  int t_max = 60;
  int min_visits = 30;
  TransitionConvention convention = TransitionConvention::OnChange;
  ReturnBinning return_binning;
  IndexBinning index_binning;

  std::int64_t burn_in() const { return m + 1; }
  void validate() const;
};

// Estimated (or hand-specified) indexed semi-Markov kernel Q_ij(v;t), stored
// as cumulative-in-t probabilities plus the raw counts when estimated.
// Sojourns longer than t_max accumulate at t_max, so every H reaches 1.
// A v-marginalized copy backs rarely visited (i,v) cells.
class IndexedKernel {
 public:
  struct Cell {
    const double* p;  // S entries: p[j]
    const double* q;  // S*t_max entries: q[j*t_max + (t-1)], cumulative in t
    Provenance tag;
  };

  IndexedKernel() = default;

  KernelMeta meta;
  // First m+2 transitions of the estimation chain: the canonical simulation
  // start. Empty for hand-built kernels.
  std::vector<TimedState> canonical_init;
  std::vector<std::int64_t> counts;   // [i][v][j][t-1]; empty for synthetic
  std::vector<std::int64_t> visits;   // [i][v]
  std::vector<double> q;              // [i][v][j][t-1]
  std::vector<double> p;              // [i][v][j]
  std::vector<std::int64_t> backoff_visits;  // [i]
  std::vector<double> backoff_q;             // [i][j][t-1]
  std::vector<double> backoff_p;             // [i][j]

  std::size_t q_index(int i, int v, int j, int t) const {
    return ((std::size_t(i) * meta.V + v) * meta.S + j) * meta.t_max + (t - 1);
  }
  std::size_t p_index(int i, int v, int j) const {
    return (std::size_t(i) * meta.V + v) * meta.S + j;
  }

  double Q(int i, int v, int j, int t) const {
    return t <= 0 ? 0.0 : q[q_index(i, v, j, std::min(t, meta.t_max))];
  }
  double prob(int i, int v, int j) const { return p[p_index(i, v, j)]; }
  std::int64_t visit_count(int i, int v) const {
    return visits[std::size_t(i) * meta.V + v];
  }

  // H_i(v;t) for t = 1..t_max. Unvisited cells use the marginal when
  // backoff is allowed, otherwise MissingCell.
  std::vector<double> sojourn_cdf(int i, int v,
                                  bool backoff_allowed = true) const;

  // G_ij(v;t) for t = 1..t_max; identically 1 when p_ij(v) = 0.
  std::vector<double> conditional_wait(int i, int v, int j) const;

  // The (i,v) cell when visit_count >= min_visits, else the v-marginal cell
  // for state i. UnreachableState when state i was never visited at all.
  Cell lookup_with_backoff(int i, int v, bool backoff_allowed = true) const;

  // Inverse-CDF draws; u in [0,1). Sojourn ties resolve to the smallest t
  // with G(t) >= u.
  static int sample_next_state(const Cell& cell, int S, double u);
  int sample_sojourn(const Cell& cell, int j, double u) const;

  // Throws on any violated estimator invariant (row sums, monotonicity,
  // count reconciliation, the Q = p*G identity).
  void check_invariants() const;

  std::int64_t total_transition_count() const;
};

// Empirical-frequency estimate. index_values[n] must be finite for every
// n >= burn-in (the first m+1 transitions seed the index).
IndexedKernel estimate_kernel(const EmbeddedChain& chain,
                              std::span<const double> index_values,
                              const KernelMeta& meta);

// Builds a kernel from exact tables: next-state probabilities p[i][v][j] and
// sojourn CDFs g[i][v][j][t-1] (each row reaching 1 at t_max). Cells are
// marked fully visited; the backoff marginal averages levels uniformly.
IndexedKernel kernel_from_tables(const KernelMeta& meta,
                                 std::span<const double> p_table,
                                 std::span<const double> g_table);

// Embedded-chain transition probabilities p[i][v][j]; rows sum to 1 on
// visited cells (identical to k.p, which Q reaches at t_max).
std::vector<double> embedded_probs(const IndexedKernel& k);

}  // namespace ismm

#endif  // ISMM_KERNEL_HPP
