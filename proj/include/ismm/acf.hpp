#ifndef ISMM_ACF_HPP
#define ISMM_ACF_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ismm/kernel.hpp"
#include "ismm/market_ingest.hpp"
#include "ismm/state_space.hpp"

namespace ismm {

struct AcfReport {
  std::vector<int> taus;      // 1..tau_max
  std::vector<double> sigma;  // autocorrelation per tau
  std::size_t n_obs = 0;
  std::string label;
};

// Sigma(tau) = Cov(R^2(t+tau), R^2(t)) / Var(R^2(t)), biased (1/N)
// normalization for both moments.
AcfReport acf_squared(std::span<const double> returns, int tau_max,
                      std::string label = "");

// Plain autocorrelation of the raw series (the uncorrelated-returns check).
AcfReport acf_raw(std::span<const double> values, int tau_max,
                  std::string label = "");

// Mean over tau of the squared gap between two curves on the same grid.
double mse_acf(const AcfReport& reference, const AcfReport& candidate);

// Elementwise mean of replication curves.
AcfReport average_acf(const std::vector<AcfReport>& curves, std::string label);

// Estimation knobs shared by the sweep, the model comparison and the CLI.
struct PipelineOptions {
  int S = 5;
  int V = 5;
  int t_max = 60;
  int min_visits = 30;
  std::vector<double> return_quantiles;  // empty: defaults for S
  TransitionConvention convention = TransitionConvention::OnChange;
  bool backoff_allowed = true;
};

// Full estimation pipeline for one memory value: fit the return bins, embed
// the chain, compute the index, fit its levels and estimate the kernel.
struct EstimationArtifacts {
  ReturnBinning bins;
  EmbeddedChain chain;
  std::vector<double> index_values;
  IndexedKernel kernel;
};

EstimationArtifacts estimate_pipeline(const ReturnSeries& data, int m,
                                      const PipelineOptions& options);

struct SweepConfig {
  std::vector<int> m_grid;  // empty: 5..200 step 5
  int replications = 10;
  int tau_max = 100;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  PipelineOptions options;
};

struct SweepEntry {
  int m = 0;
  double mse = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  int replications = 0;
  int tau_max = 0;
  std::uint64_t seed = 0;
  int best_m = 0;      // argmin over successful entries, ties to smaller m
  double best_mse = 0.0;
};

std::vector<int> default_m_grid();

// For each m: estimate the kernel on `data`, simulate `replications` series
// of the same minute length, average their Sigma curves and score them
// against the data curve. Entries failing estimation/simulation are recorded
// without aborting the sweep. Deterministic for fixed seed and inputs,
// independent of thread count.
SweepReport memory_sweep(const ReturnSeries& data, const SweepConfig& cfg);

struct ModelCurve {
  std::string label;
  std::vector<double> sigma;
  bool ok = false;
  std::string error;
};

struct ComparisonReport {
  std::vector<int> taus;
  AcfReport data;
  std::vector<ModelCurve> models;
  int replications = 0;
  std::uint64_t seed = 0;
};

// Aligned Sigma curves for the data, optionally the plain semi-Markov model
// (V collapsed to 1) and each indexed model in m_list.
ComparisonReport compare_models(const ReturnSeries& data,
                                const std::vector<int>& m_list,
                                bool include_no_index, int replications,
                                int tau_max, std::uint64_t seed,
                                const PipelineOptions& options,
                                int threads = 0);

// Replication stream id used for all simulation seeding (documented rule:
// substream(seed, (m << 20) | rep); the plain model uses m = 0).
std::uint64_t replication_stream(int m, int rep);

}  // namespace ismm

#endif  // ISMM_ACF_HPP
