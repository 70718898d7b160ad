#include "ismm/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ismm/rng.hpp"

using namespace ismm;

namespace {

KernelMeta meta_for(int S, int V, int m, int t_max,
                    std::vector<double> reps = {},
                    std::vector<double> index_bounds = {}) {
  KernelMeta meta;
  meta.S = S;
  meta.V = V;
  meta.m = m;
  meta.t_max = t_max;
  if (reps.empty())
    for (int s = 0; s < S; ++s)
      reps.push_back(-1.0 + 2.0 * double(s) / double(S - 1));
  meta.return_binning.representatives = reps;
  meta.return_binning.boundaries.assign(std::size_t(S - 1), 0.0);
  for (int k = 0; k + 1 < S; ++k)
    meta.return_binning.boundaries[std::size_t(k)] =
        0.5 * (reps[std::size_t(k)] + reps[std::size_t(k + 1)]);
  meta.index_binning.boundaries = std::move(index_bounds);
  return meta;
}

// Two states, one index level; the four counted transitions out of state 0
// all land in state 1 with sojourns 1, 1, 2, 3.
IndexedKernel hand_kernel() {
  EmbeddedChain chain;
  chain.states = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  chain.times = {0, 1, 2, 3, 4, 5, 6, 8, 9, 12};
  const KernelMeta meta = meta_for(2, 1, 1, 10, {-1.0, 1.0});
  std::vector<double> index_values(chain.size(), 1.0);
  return estimate_kernel(chain, index_values, meta);
}

IndexedKernel random_kernel(std::uint64_t seed, int S, int V, int transitions,
                            int max_sojourn) {
  Rng rng(seed);
  EmbeddedChain chain;
  int state = 0;
  std::int64_t clock = 0;
  for (int n = 0; n < transitions; ++n) {
    chain.states.push_back(state);
    chain.times.push_back(clock);
    int next = int(rng.next_below(std::uint64_t(S)));
    if (next == state) next = (next + 1) % S;
    state = next;
    clock += 1 + std::int64_t(rng.next_below(std::uint64_t(max_sojourn)));
  }

  KernelMeta meta = meta_for(S, V, 2, 12);
  IndexParams params;
  params.m = meta.m;
  params.representatives = meta.return_binning.representatives;
  const auto index_values = compute_transition_indices(chain, params);
  if (V > 1) {
    std::vector<double> finite;
    for (double u : index_values)
      if (std::isfinite(u)) finite.push_back(u);
    meta.index_binning = fit_index_bins(finite, V);
  }
  return estimate_kernel(chain, index_values, meta);
}

TEST(EstimateKernel, HandCountedCumulativeKernel) {
  const IndexedKernel k = hand_kernel();
  EXPECT_EQ(k.visit_count(0, 0), 4);
  EXPECT_DOUBLE_EQ(k.prob(0, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(k.prob(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 2), 0.75);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 3), 1.0);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 10), 1.0);
}

TEST(EstimateKernel, HandCountedSojournCdf) {
  const IndexedKernel k = hand_kernel();
  const auto h = k.sojourn_cdf(0, 0);
  EXPECT_DOUBLE_EQ(h[0], 0.5);
  EXPECT_DOUBLE_EQ(h[1], 0.75);
  EXPECT_DOUBLE_EQ(h[2], 1.0);
  EXPECT_DOUBLE_EQ(h.back(), 1.0);
}

TEST(EstimateKernel, HandCountedConditionalWait) {
  const IndexedKernel k = hand_kernel();
  const auto g = k.conditional_wait(0, 0, 1);
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 0.75);
  EXPECT_DOUBLE_EQ(g[2], 1.0);
}

TEST(EstimateKernel, NullTransitionHasUnitConditionalWait) {
  const IndexedKernel k = hand_kernel();
  const auto g = k.conditional_wait(0, 0, 0);  // p = 0
  for (double v : g) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(EstimateKernel, CountsReconcileWithBurnIn) {
  const IndexedKernel k = random_kernel(11, 5, 3, 5000, 6);
  std::int64_t total = 0;
  for (std::int64_t c : k.counts) total += c;
  EXPECT_EQ(total, 5000 - 1 - k.meta.burn_in());
  EXPECT_EQ(k.total_transition_count(), total);
}

TEST(EstimateKernel, InvariantSuitePasses) {
  const IndexedKernel k = random_kernel(12, 5, 5, 20000, 8);
  EXPECT_NO_THROW(k.check_invariants());
}

TEST(EstimateKernel, RowsSumToOneOnVisitedCells) {
  const IndexedKernel k = random_kernel(13, 4, 2, 8000, 5);
  for (int i = 0; i < 4; ++i) {
    for (int v = 0; v < 2; ++v) {
      if (k.visit_count(i, v) == 0) continue;
      double sum = 0.0;
      for (int j = 0; j < 4; ++j) sum += k.prob(i, v, j);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(EstimateKernel, QFactorsIntoPTimesG) {
  const IndexedKernel k = random_kernel(14, 3, 3, 6000, 7);
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < 3; ++v)
      for (int j = 0; j < 3; ++j) {
        if (k.prob(i, v, j) == 0.0) continue;
        const auto g = k.conditional_wait(i, v, j);
        for (int t = 1; t <= k.meta.t_max; ++t)
          EXPECT_NEAR(k.Q(i, v, j, t), k.prob(i, v, j) * g[std::size_t(t - 1)],
                      1e-12);
      }
}

TEST(EstimateKernel, LawOfLargeNumbersForUniformChain) {
  const int S = 5;
  Rng rng(15);
  EmbeddedChain chain;
  int state = 0;
  for (int n = 0; n < 100000; ++n) {
    chain.states.push_back(state);
    chain.times.push_back(n);
    // Uniform over the S-1 other states.
    int next = int(rng.next_below(std::uint64_t(S - 1)));
    if (next >= state) ++next;
    state = next;
  }
  KernelMeta meta = meta_for(S, 1, 1, 12);
  std::vector<double> index_values(chain.size(), 0.5);
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);
  // Each off-diagonal target is drawn uniformly; expect 1/(S-1) within 3
  // standard errors.
  for (int i = 0; i < S; ++i) {
    const double n_row = double(k.visit_count(i, 0));
    ASSERT_GT(n_row, 500.0);
    const double p0 = 1.0 / double(S - 1);
    const double se = std::sqrt(p0 * (1.0 - p0) / n_row);
    for (int j = 0; j < S; ++j) {
      if (j == i) continue;
      EXPECT_NEAR(k.prob(i, 0, j), p0, 3.0 * se) << "i=" << i << " j=" << j;
    }
  }
}

TEST(EstimateKernel, UnitSojournsPutAllMassAtTOne) {
  Rng rng(77);
  EmbeddedChain chain;
  int state = 0;
  for (int n = 0; n < 4000; ++n) {
    chain.states.push_back(state);
    chain.times.push_back(n);
    state = (state + 1 + int(rng.next_below(2))) % 3;
  }
  KernelMeta meta = meta_for(3, 1, 1, 8);
  std::vector<double> index_values(chain.size(), 0.5);
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_DOUBLE_EQ(k.Q(i, 0, j, 1), k.prob(i, 0, j));
}

TEST(EstimateKernel, EveryMinuteConventionKeepsSelfMass) {
  // Under the every-minute convention the chain may repeat states and the
  // kernel carries self-transition mass; the invariant suite must accept it.
  Rng rng(78);
  EmbeddedChain chain;
  for (int n = 0; n < 6000; ++n) {
    chain.states.push_back(int(rng.next_below(3)));
    chain.times.push_back(n);
  }
  KernelMeta meta = meta_for(3, 1, 2, 6);
  meta.convention = TransitionConvention::EveryMinute;
  std::vector<double> index_values(chain.size(), 0.5);
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);
  EXPECT_NO_THROW(k.check_invariants());
  double self_mass = 0.0;
  for (int i = 0; i < 3; ++i) self_mass += k.prob(i, 0, i);
  EXPECT_GT(self_mass, 0.5);  // ~1/3 per row on uniform labels
}

TEST(EstimateKernel, SojournsBeyondCapAccumulateAtCap) {
  EmbeddedChain chain;
  chain.states = {0, 1, 0, 1, 0, 1};
  chain.times = {0, 1, 2, 3, 4, 14};  // final counted sojourn of 10 > t_max 4
  KernelMeta meta = meta_for(2, 1, 1, 4, {-1.0, 1.0});
  std::vector<double> index_values(chain.size(), 1.0);
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);
  // Counted transitions: n=2 (sojourn 1), n=3 (1), n=4 (10 -> capped at 4).
  EXPECT_EQ(k.visit_count(0, 0), 2);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 3), 0.5);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 4), 1.0);
  const auto h = k.sojourn_cdf(0, 0);
  EXPECT_DOUBLE_EQ(h.back(), 1.0);
}

TEST(Backoff, UnvisitedCellFallsBackToMarginal) {
  // Two levels; state 0 is only ever seen at level 0 (index values pinned
  // below the boundary), so cell (0,1) is empty.
  EmbeddedChain chain;
  Rng rng(16);
  int state = 0;
  std::int64_t clock = 0;
  for (int n = 0; n < 200; ++n) {
    chain.states.push_back(state);
    chain.times.push_back(clock);
    state = 1 - state;
    clock += 1 + std::int64_t(rng.next_below(3));
  }
  KernelMeta meta = meta_for(2, 2, 1, 8, {-1.0, 1.0}, {10.0});
  std::vector<double> index_values(chain.size(), 1.0);  // always level 0
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);

  EXPECT_EQ(k.visit_count(0, 1), 0);
  const auto cell = k.lookup_with_backoff(0, 1);
  EXPECT_EQ(cell.tag, Provenance::Backoff);
  EXPECT_GT(cell.p[1], 0.0);

  const auto direct = k.lookup_with_backoff(0, 0);
  EXPECT_EQ(direct.tag, Provenance::Direct);

  EXPECT_THROW(k.sojourn_cdf(0, 1, /*backoff_allowed=*/false), Error);
}

TEST(Backoff, NeverVisitedStateIsUnreachable) {
  EmbeddedChain chain;
  chain.states = {0, 1, 0, 1, 0, 1, 0, 1};
  chain.times = {0, 1, 2, 3, 4, 5, 6, 7};
  KernelMeta meta = meta_for(3, 1, 1, 4);
  std::vector<double> index_values(chain.size(), 0.5);
  const IndexedKernel k = estimate_kernel(chain, index_values, meta);
  try {
    k.lookup_with_backoff(2, 0);
    FAIL() << "expected UnreachableState";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnreachableState);
  }
}

TEST(KernelFromTables, ExactTablesRoundThrough) {
  KernelMeta meta = meta_for(2, 1, 1, 3, {-1.0, 1.0});
  // p: 0->1 and 1->0 with certainty; G for 0->1: steps 0.2/0.7/1.0,
  // for 1->0: deterministic sojourn 2.
  const std::vector<double> p = {0.0, 1.0, 1.0, 0.0};
  const std::vector<double> g = {1.0, 1.0, 1.0,   // (0,0) row: p=0, G==1
                                 0.2, 0.7, 1.0,   // (0,1)
                                 0.0, 1.0, 1.0,   // (1,0)
                                 1.0, 1.0, 1.0};  // (1,1): p=0
  const IndexedKernel k = kernel_from_tables(meta, p, g);
  EXPECT_DOUBLE_EQ(k.prob(0, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 1), 0.2);
  EXPECT_DOUBLE_EQ(k.Q(0, 0, 1, 2), 0.7);
  EXPECT_DOUBLE_EQ(k.Q(1, 0, 0, 1), 0.0);
  EXPECT_DOUBLE_EQ(k.Q(1, 0, 0, 2), 1.0);
  EXPECT_EQ(k.lookup_with_backoff(0, 0).tag, Provenance::Direct);
}

TEST(Sampling, InverseCdfTieBreaksToSmallestT)  {
  KernelMeta meta = meta_for(2, 1, 1, 4, {-1.0, 1.0});
  const std::vector<double> p = {0.0, 1.0, 1.0, 0.0};
  const std::vector<double> g = {1.0, 1.0, 1.0, 1.0,    // (0,0) unused
                                 0.5, 0.5, 0.75, 1.0,   // (0,1): flat spot
                                 1.0, 1.0, 1.0, 1.0,    // (1,0) immediate
                                 1.0, 1.0, 1.0, 1.0};
  const IndexedKernel k = kernel_from_tables(meta, p, g);
  const auto cell = k.lookup_with_backoff(0, 0);
  EXPECT_EQ(k.sample_sojourn(cell, 1, 0.0), 1);
  EXPECT_EQ(k.sample_sojourn(cell, 1, 0.49), 1);
  EXPECT_EQ(k.sample_sojourn(cell, 1, 0.5), 1);    // G(1)=0.5 >= u: pick 1
  EXPECT_EQ(k.sample_sojourn(cell, 1, 0.51), 3);   // flat spot skipped
  EXPECT_EQ(k.sample_sojourn(cell, 1, 0.99), 4);
}

TEST(Sampling, NextStateFollowsRow) {
  KernelMeta meta = meta_for(3, 1, 1, 2);
  const std::vector<double> p = {0.0, 0.25, 0.75, 1.0, 0.0, 0.0,
                                 0.5, 0.5,  0.0};
  std::vector<double> g(3 * 3 * 2, 1.0);
  const IndexedKernel k = kernel_from_tables(meta, p, g);
  const auto cell = k.lookup_with_backoff(0, 0);
  EXPECT_EQ(IndexedKernel::sample_next_state(cell, 3, 0.1), 1);
  EXPECT_EQ(IndexedKernel::sample_next_state(cell, 3, 0.24), 1);
  EXPECT_EQ(IndexedKernel::sample_next_state(cell, 3, 0.25), 2);
  EXPECT_EQ(IndexedKernel::sample_next_state(cell, 3, 0.999), 2);
}

}  // namespace
