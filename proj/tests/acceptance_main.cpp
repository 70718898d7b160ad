// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion pins its tolerances and seeds in code; everything is
// deterministic, including under the parallel sweep.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ismm/acf.hpp"
#include "ismm/io.hpp"
#include "ismm/renewal.hpp"
#include "ismm/rng.hpp"
#include "ismm/simulation.hpp"

using namespace ismm;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("%s  %d. %-28s %s  [%.1fs]\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run(int id, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& criterion) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = criterion();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  report(id, name, pass, detail, seconds);
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Hand-specified generating kernel for the round trip: S=3, V=2, m=5,
// t_max=10, level-dependent transition rows and truncated-geometric sojourns.
IndexedKernel generating_kernel() {
  const int S = 3, V = 2, m = 5, t_max = 10;
  KernelMeta meta;
  meta.S = S;
  meta.V = V;
  meta.m = m;
  meta.t_max = t_max;
  meta.return_binning.representatives = {-0.03, 0.0, 0.02};
  meta.return_binning.boundaries = {-0.015, 0.01};
  meta.index_binning.boundaries = {3.0e-4};

  std::vector<double> p(std::size_t(S) * V * S, 0.0);
  const auto P = [&](int i, int v, int j) -> double& {
    return p[std::size_t((i * V + v) * S + j)];
  };
  P(0, 0, 1) = 0.8;  P(0, 0, 2) = 0.2;
  P(1, 0, 0) = 0.3;  P(1, 0, 2) = 0.7;
  P(2, 0, 1) = 0.6;  P(2, 0, 0) = 0.4;
  P(0, 1, 1) = 0.25; P(0, 1, 2) = 0.75;
  P(1, 1, 0) = 0.65; P(1, 1, 2) = 0.35;
  P(2, 1, 1) = 0.2;  P(2, 1, 0) = 0.8;

  std::vector<double> g(p.size() * t_max, 1.0);
  for (int i = 0; i < S; ++i)
    for (int v = 0; v < V; ++v)
      for (int j = 0; j < S; ++j) {
        const double cont = 0.2 + 0.1 * i + 0.25 * v + 0.05 * j;
        for (int t = 1; t < t_max; ++t)
          g[std::size_t(((i * V + v) * S + j) * t_max + (t - 1))] =
              1.0 - std::pow(cont, double(t));
      }
  return kernel_from_tables(meta, p, g);
}

std::vector<TimedState> generating_init() {
  return {{0, 0}, {1, 2}, {0, 3}, {1, 5}, {2, 6}, {1, 8}, {0, 9}};
}

ReturnSeries acceptance_benchmark() {
  RegimeParams params;
  params.minutes = 500000;
  params.rho = 0.99;
  return make_regime_benchmark(params, 2026);
}

// ---------------------------------------------------------------- criteria

std::pair<bool, std::string> criterion_round_trip() {
  const IndexedKernel truth = generating_kernel();
  SimConfig cfg;
  cfg.horizon = 900000;  // comfortably above 2e5 transitions
  cfg.seed = 20260101;
  cfg.init = generating_init();
  const SimResult sim = simulate(truth, cfg);
  if (sim.simulated_transitions < 200000)
    return {false, fmt("only %.0f transitions simulated",
                       double(sim.simulated_transitions))};

  IndexParams params;
  params.m = truth.meta.m;
  params.representatives = truth.meta.return_binning.representatives;
  const auto index_values = compute_transition_indices(sim.chain, params);
  const IndexedKernel fitted =
      estimate_kernel(sim.chain, index_values, truth.meta);

  double p_err = 0.0, q_err = 0.0;
  int checked_cells = 0;
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < 2; ++v) {
      if (fitted.visit_count(i, v) < 500) continue;
      ++checked_cells;
      for (int j = 0; j < 3; ++j) {
        p_err = std::max(p_err,
                         std::abs(fitted.prob(i, v, j) - truth.prob(i, v, j)));
        for (int t = 1; t <= truth.meta.t_max; ++t)
          q_err = std::max(
              q_err, std::abs(fitted.Q(i, v, j, t) - truth.Q(i, v, j, t)));
      }
    }
  const bool pass = checked_cells == 6 && p_err < 0.03 && q_err < 0.04;
  return {pass, fmt("max|dp|=%.4f (<0.03), max|dQ|=%.4f (<0.04)", p_err,
                    q_err) +
                    ", cells=" + std::to_string(checked_cells)};
}

std::pair<bool, std::string> criterion_uncorrelated_returns() {
  const ReturnSeries data = acceptance_benchmark();
  PipelineOptions opt;
  const EstimationArtifacts artifacts = estimate_pipeline(data, 50, opt);

  SimConfig cfg;
  cfg.horizon = 500000;
  cfg.seed = 14;
  cfg.init = chain_prefix(artifacts.chain, 50);
  const SimResult sim = simulate(artifacts.kernel, cfg);

  const AcfReport raw = acf_raw(sim.minute_returns, 100);
  const double band = 3.0 / std::sqrt(double(cfg.horizon));
  double worst = 0.0;
  for (double s : raw.sigma) worst = std::max(worst, std::abs(s));
  return {worst < band, fmt("max|acf|=%.5f < band %.5f", worst, band)};
}

std::pair<bool, std::string> criterion_volatility_clustering() {
  const ReturnSeries data = acceptance_benchmark();
  const std::int64_t horizon = std::int64_t(data.total_returns());
  const int replications = 10;
  const std::uint64_t seed = 7;

  PipelineOptions indexed_opt;
  const EstimationArtifacts indexed = estimate_pipeline(data, 50, indexed_opt);
  PipelineOptions plain_opt;
  plain_opt.V = 1;
  const EstimationArtifacts plain = estimate_pipeline(data, 1, plain_opt);

  const auto sigma20_samples = [&](const EstimationArtifacts& artifacts,
                                   int stream_m) {
    SimConfig cfg;
    cfg.horizon = horizon;
    cfg.init = chain_prefix(artifacts.chain, artifacts.kernel.meta.m);
    std::vector<double> values;
    for (int rep = 0; rep < replications; ++rep) {
      cfg.seed = substream_seed(seed, replication_stream(stream_m, rep));
      const SimResult sim = simulate(artifacts.kernel, cfg);
      values.push_back(acf_squared(sim.minute_returns, 20).sigma[19]);
    }
    return values;
  };
  const auto stats = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= double(xs.size() - 1);
    return std::pair<double, double>{mean,
                                     std::sqrt(var / double(xs.size()))};
  };

  const auto [mean_indexed, se_indexed] = stats(sigma20_samples(indexed, 50));
  const auto [mean_plain, se_plain] = stats(sigma20_samples(plain, 0));
  const double margin = mean_indexed - mean_plain;
  const double combined_se =
      std::sqrt(se_indexed * se_indexed + se_plain * se_plain);
  return {margin > 3.0 * combined_se,
          fmt("indexed S(20)=%.4f vs plain %.4f, margin/se=%.1f",
              mean_indexed, mean_plain, margin / combined_se)};
}

std::pair<bool, std::string> criterion_optimal_memory() {
  const ReturnSeries data = acceptance_benchmark();
  SweepConfig cfg;
  cfg.replications = 10;
  cfg.tau_max = 100;
  cfg.seed = 7;
  cfg.threads = 0;  // all cores; result independent of the count
  const SweepReport sweep = memory_sweep(data, cfg);

  int ok_entries = 0;
  for (const auto& entry : sweep.entries)
    if (entry.ok) ++ok_entries;
  const bool interior =
      sweep.best_m > sweep.entries.front().m &&
      sweep.best_m < sweep.entries.back().m;
  return {interior && ok_entries == int(sweep.entries.size()),
          "best_m=" + std::to_string(sweep.best_m) + " in (5,200), " +
              std::to_string(ok_entries) + "/40 entries ok"};
}

std::pair<bool, std::string> criterion_renewal_oracle() {
  const IndexedKernel kernel = phi_toy_kernel();
  const auto rows = phi_comparison_grid(kernel, 100000, 20260301);
  int passed = 0;
  double worst_ratio = 0.0;
  for (const auto& row : rows) {
    if (row.pass) ++passed;
    worst_ratio =
        std::max(worst_ratio, std::abs(row.phi - row.mc) / row.mc_se);
  }

  double worst_sum_gap = 0.0;
  for (int horizon : {5, 10, 20, 35, 50}) {
    double total = 0.0;
    for (int target = 0; target < 2; ++target) {
      PhiQuery q;
      q.states = {0, 1, 0};
      q.times = {-5, -2, 0};
      q.target = target;
      q.horizon = horizon;
      total += phi_marginal(kernel, q);
    }
    worst_sum_gap = std::max(worst_sum_gap, std::abs(total - 1.0));
  }
  const bool pass = passed == int(rows.size()) && worst_sum_gap < 1e-9;
  return {pass, std::to_string(passed) + "/10 queries within 3 MC se " +
                    fmt("(worst %.2f se), marginal sum gap %.1e", worst_ratio,
                        worst_sum_gap)};
}

std::pair<bool, std::string> criterion_sigma_brute_force() {
  Rng rng(616);
  std::vector<double> returns(10000);
  double sigma = 0.001;
  for (auto& r : returns) {
    // Mildly heteroskedastic so the squared series has structure.
    sigma = std::clamp(sigma * (rng.next_double() < 0.5 ? 0.98 : 1.02),
                       2e-4, 5e-3);
    r = sigma * rng.next_normal();
  }
  const AcfReport fast = acf_squared(returns, 100);

  // Literal double-loop evaluation.
  double mean = 0.0;
  for (double r : returns) mean += r * r;
  mean /= double(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r * r - mean) * (r * r - mean);
  var /= double(returns.size());

  double worst = 0.0;
  for (int tau = 1; tau <= 100; ++tau) {
    double cov = 0.0;
    for (std::size_t t = 0; t + std::size_t(tau) < returns.size(); ++t)
      cov += (returns[t] * returns[t] - mean) *
             (returns[t + std::size_t(tau)] * returns[t + std::size_t(tau)] -
              mean);
    cov /= double(returns.size());
    worst = std::max(worst,
                     std::abs(fast.sigma[std::size_t(tau - 1)] - cov / var));
  }
  return {worst < 1e-10, fmt("max gap %.2e < 1e-10", worst)};
}

std::pair<bool, std::string> criterion_determinism() {
  const auto run_pipeline = [](int threads) {
    std::map<std::string, std::string> artifacts;
    RegimeParams params;
    params.minutes = 30000;
    params.rho = 0.99;
    const ReturnSeries data = make_regime_benchmark(params, 99);
    artifacts["returns.csv"] = return_series_csv(data);

    PipelineOptions opt;
    const EstimationArtifacts est = estimate_pipeline(data, 10, opt);
    artifacts["kernel.json"] = to_json(est.kernel).dump();

    SimConfig cfg;
    cfg.horizon = 30000;
    cfg.seed = 4;
    cfg.init = chain_prefix(est.chain, 10);
    artifacts["sim.csv"] = sim_result_csv(simulate(est.kernel, cfg));

    artifacts["compare.csv"] = comparison_csv(
        compare_models(data, {10, 25}, true, 2, 40, 5, opt, threads));

    SweepConfig sweep_cfg;
    sweep_cfg.m_grid = {5, 10, 15, 20};
    sweep_cfg.replications = 2;
    sweep_cfg.tau_max = 40;
    sweep_cfg.seed = 5;
    sweep_cfg.threads = threads;
    const SweepReport sweep = memory_sweep(data, sweep_cfg);
    artifacts["sweep.csv"] = sweep_csv(sweep);
    artifacts["sweep.json"] = sweep_summary_json(sweep).dump();
    return artifacts;
  };

  const auto first = run_pipeline(1);
  const auto second = run_pipeline(1);
  const auto threaded = run_pipeline(4);
  for (const auto& [name, content] : first) {
    if (second.at(name) != content)
      return {false, name + " differs between identical runs"};
    if (threaded.at(name) != content)
      return {false, name + " differs across thread counts"};
  }
  return {true, std::to_string(first.size()) +
                    " artifacts byte-identical across runs and threads"};
}

std::pair<bool, std::string> criterion_ingest_conformance() {
  TradingCalendar cal;
  cal.session_open = 9 * 60;
  cal.continuous_start = 9 * 60;
  cal.continuous_end = 17 * 60 + 25;
  cal.regime_change_date = make_day(2009, 9, 28);
  cal.pre_change_continuous_start = 9 * 60 + 5;

  const auto full_day = [&](DayNumber date, int continuous_start_min) {
    TickSeries ticks;
    const std::int64_t day_ms = std::int64_t(date) * kMsPerDay;
    ticks.ticks.push_back({day_ms + (9 * 60) * kMsPerMinute + 30000, 10.0});
    const int last = 17 * 60 + 25 - 1;
    for (int minute = continuous_start_min; minute <= last; ++minute)
      ticks.ticks.push_back({day_ms + minute * kMsPerMinute + 30000, 10.5});
    ticks.ticks.push_back({day_ms + (17 * 60 + 30) * kMsPerMinute, 10.25});
    return ticks;
  };

  const MinuteSeries post = resample_to_minutes(
      full_day(make_day(2010, 1, 4), 9 * 60), cal);
  const MinuteSeries pre = resample_to_minutes(
      full_day(make_day(2009, 9, 25), 9 * 60 + 5), cal);
  const std::size_t n_post = post.days.at(0).prices.size();
  const std::size_t n_pre = pre.days.at(0).prices.size();
  return {n_post == 507 && n_pre == 502,
          "post-change day: " + std::to_string(n_post) +
              " (want 507), pre-change day: " + std::to_string(n_pre) +
              " (want 502)"};
}

}  // namespace

int main() {
  std::printf("ismm acceptance suite\n");
  run(1, "round-trip kernel recovery", criterion_round_trip);
  run(2, "uncorrelated returns", criterion_uncorrelated_returns);
  run(3, "volatility clustering", criterion_volatility_clustering);
  run(4, "optimal memory (sweep)", criterion_optimal_memory);
  run(5, "renewal-equation oracle", criterion_renewal_oracle);
  run(6, "brute-force sigma equality", criterion_sigma_brute_force);
  run(7, "pipeline determinism", criterion_determinism);
  run(8, "ingest conformance", criterion_ingest_conformance);
  if (failures > 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
