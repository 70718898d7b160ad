#include "ismm/acf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "ismm/simulation.hpp"

namespace ismm {

namespace {

AcfReport autocorrelation(std::span<const double> x, int tau_max,
                          std::string label, std::size_t n_obs) {
  const std::size_t n = x.size();
  if (tau_max < 1) throw Error(ErrorCode::InvalidArgument, "tau_max must be >= 1");
  if (n <= std::size_t(tau_max) + 1)
    throw Error(ErrorCode::InsufficientData,
                "series of " + std::to_string(n) +
                    " too short for tau_max " + std::to_string(tau_max));

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(n);

  std::vector<double> centered(n);
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    centered[t] = x[t] - mean;
    var += centered[t] * centered[t];
  }
  var /= double(n);
  // Exactly-constant input leaves only accumulation noise (~1e-32 relative).
  if (var <= mean * mean * 1e-20)
    throw Error(ErrorCode::DegenerateVariance, "series has zero variance");

  AcfReport report;
  report.label = std::move(label);
  report.n_obs = n_obs;
  report.taus.resize(std::size_t(tau_max));
  report.sigma.resize(std::size_t(tau_max));
  for (int tau = 1; tau <= tau_max; ++tau) {
    double cov = 0.0;
    for (std::size_t t = 0; t + std::size_t(tau) < n; ++t)
      cov += centered[t] * centered[t + std::size_t(tau)];
    cov /= double(n);
    report.taus[std::size_t(tau - 1)] = tau;
    report.sigma[std::size_t(tau - 1)] = cov / var;
  }
  return report;
}

void parallel_for_index(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& fn) {
  if (threads == 0)
    threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, int(count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1))
        fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct FittedData {
  ReturnBinning bins;
  EmbeddedChain chain;
  std::int64_t horizon;
};

FittedData fit_data(const ReturnSeries& data, const PipelineOptions& opt) {
  FittedData fd;
  fd.bins = fit_return_bins(data, opt.S, opt.return_quantiles);
  const StateSeries ss = discretize_returns(data, fd.bins);
  fd.chain = extract_embedded_chain(ss, opt.convention);
  fd.horizon = std::int64_t(data.total_returns());
  return fd;
}

// Kernel estimation against pre-fitted bins and chain (the per-m inner step
// of estimate_pipeline; the sweep reuses the shared chain).
IndexedKernel estimate_for_m(const ReturnBinning& bins,
                             const EmbeddedChain& chain,
                             const PipelineOptions& opt, int m, int levels,
                             std::vector<double>* index_values_out) {
  IndexParams params;
  params.m = m;
  params.representatives = bins.representatives;
  std::vector<double> index_values =
      compute_transition_indices(chain, params);

  IndexBinning ibins;
  if (levels > 1) {
    std::vector<double> finite;
    finite.reserve(index_values.size());
    for (double u : index_values)
      if (std::isfinite(u)) finite.push_back(u);
    ibins = fit_index_bins(finite, levels);
  }

  KernelMeta meta;
  meta.S = opt.S;
  meta.V = levels;
  meta.m = m;
  meta.t_max = opt.t_max;
  meta.min_visits = opt.min_visits;
  meta.convention = opt.convention;
  meta.return_binning = bins;
  meta.index_binning = ibins;
  IndexedKernel kernel = estimate_kernel(chain, index_values, meta);
  if (index_values_out) *index_values_out = std::move(index_values);
  return kernel;
}

// Estimate for one m and average the replication curves. Throws on failure.
std::vector<double> model_curve(const FittedData& fd,
                                const PipelineOptions& opt, int m, int levels,
                                int stream_m, int replications, int tau_max,
                                std::uint64_t seed) {
  const IndexedKernel kernel =
      estimate_for_m(fd.bins, fd.chain, opt, m, levels, nullptr);

  SimConfig sim_cfg;
  sim_cfg.horizon = fd.horizon;
  sim_cfg.init = chain_prefix(fd.chain, m);
  sim_cfg.backoff_allowed = opt.backoff_allowed;

  std::vector<AcfReport> curves;
  curves.reserve(std::size_t(replications));
  for (int rep = 0; rep < replications; ++rep) {
    sim_cfg.seed = substream_seed(seed, replication_stream(stream_m, rep));
    const SimResult sim = simulate(kernel, sim_cfg);
    curves.push_back(acf_squared(sim.minute_returns, tau_max));
  }
  return average_acf(curves, "").sigma;
}

}  // namespace

AcfReport acf_squared(std::span<const double> returns, int tau_max,
                      std::string label) {
  std::vector<double> squares(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t)
    squares[t] = returns[t] * returns[t];
  return autocorrelation(squares, tau_max, std::move(label), returns.size());
}

AcfReport acf_raw(std::span<const double> values, int tau_max,
                  std::string label) {
  return autocorrelation(values, tau_max, std::move(label), values.size());
}

double mse_acf(const AcfReport& reference, const AcfReport& candidate) {
  if (reference.taus != candidate.taus)
    throw Error(ErrorCode::MismatchedGrids, "tau grids differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < reference.sigma.size(); ++k) {
    const double d = reference.sigma[k] - candidate.sigma[k];
    acc += d * d;
  }
  return acc / double(reference.sigma.size());
}

AcfReport average_acf(const std::vector<AcfReport>& curves,
                      std::string label) {
  if (curves.empty()) throw Error(ErrorCode::EmptyInput, "no curves");
  AcfReport out;
  out.label = std::move(label);
  out.taus = curves.front().taus;
  out.n_obs = curves.front().n_obs;
  out.sigma.assign(out.taus.size(), 0.0);
  for (const auto& c : curves) {
    if (c.taus != out.taus)
      throw Error(ErrorCode::MismatchedGrids, "tau grids differ");
    for (std::size_t k = 0; k < out.sigma.size(); ++k)
      out.sigma[k] += c.sigma[k];
  }
  for (double& s : out.sigma) s /= double(curves.size());
  return out;
}

EstimationArtifacts estimate_pipeline(const ReturnSeries& data, int m,
                                      const PipelineOptions& options) {
  const FittedData fd = fit_data(data, options);
  EstimationArtifacts artifacts;
  artifacts.bins = fd.bins;
  artifacts.chain = fd.chain;
  artifacts.kernel = estimate_for_m(fd.bins, fd.chain, options, m, options.V,
                                    &artifacts.index_values);
  return artifacts;
}

std::vector<int> default_m_grid() {
  std::vector<int> grid;
  for (int m = 5; m <= 200; m += 5) grid.push_back(m);
  return grid;
}

std::uint64_t replication_stream(int m, int rep) {
  return (std::uint64_t(std::uint32_t(m)) << 20) | std::uint64_t(rep);
}

SweepReport memory_sweep(const ReturnSeries& data, const SweepConfig& cfg) {
  SweepConfig c = cfg;
  if (c.m_grid.empty()) c.m_grid = default_m_grid();
  for (std::size_t k = 0; k + 1 < c.m_grid.size(); ++k)
    if (c.m_grid[k] >= c.m_grid[k + 1])
      throw Error(ErrorCode::InvalidArgument, "m grid must be ascending");
  if (c.replications < 1)
    throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");

  const FittedData fd = fit_data(data, c.options);
  const AcfReport data_acf =
      acf_squared(data.concatenated(), c.tau_max, "data");

  SweepReport report;
  report.entries.resize(c.m_grid.size());
  report.replications = c.replications;
  report.tau_max = c.tau_max;
  report.seed = c.seed;

  parallel_for_index(c.m_grid.size(), c.threads, [&](std::size_t k) {
    SweepEntry& entry = report.entries[k];
    entry.m = c.m_grid[k];
    try {
      AcfReport avg;
      avg.taus = data_acf.taus;
      avg.sigma = model_curve(fd, c.options, entry.m, c.options.V, entry.m,
                              c.replications, c.tau_max, c.seed);
      entry.mse = mse_acf(data_acf, avg);
      entry.ok = true;
    } catch (const Error& e) {
      entry.ok = false;
      entry.error = e.what();
    }
  });

  report.best_m = 0;
  report.best_mse = 0.0;
  bool found = false;
  for (const auto& entry : report.entries) {
    if (!entry.ok) continue;
    if (!found || entry.mse < report.best_mse) {
      report.best_m = entry.m;
      report.best_mse = entry.mse;
      found = true;
    }
  }
  if (!found)
    throw Error(ErrorCode::InsufficientData, "every sweep entry failed");
  return report;
}

ComparisonReport compare_models(const ReturnSeries& data,
                                const std::vector<int>& m_list,
                                bool include_no_index, int replications,
                                int tau_max, std::uint64_t seed,
                                const PipelineOptions& options, int threads) {
  const FittedData fd = fit_data(data, options);

  ComparisonReport report;
  report.data = acf_squared(data.concatenated(), tau_max, "data");
  report.taus = report.data.taus;
  report.replications = replications;
  report.seed = seed;

  struct Job {
    std::string label;
    int m;
    int levels;
    int stream_m;
  };
  std::vector<Job> jobs;
  if (include_no_index) jobs.push_back({"no-index", 1, 1, 0});
  for (int m : m_list)
    jobs.push_back({"m=" + std::to_string(m), m, options.V, m});

  report.models.resize(jobs.size());
  parallel_for_index(jobs.size(), threads, [&](std::size_t k) {
    ModelCurve& curve = report.models[k];
    curve.label = jobs[k].label;
    try {
      curve.sigma =
          model_curve(fd, options, jobs[k].m, jobs[k].levels,
                      jobs[k].stream_m, replications, tau_max, seed);
      curve.ok = true;
    } catch (const Error& e) {
      curve.ok = false;
      curve.error = e.what();
    }
  });
  return report;
}

}  // namespace ismm
