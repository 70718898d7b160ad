// ismm: indexed semi-Markov model pipeline for intraday returns.
//
// Subcommands: ingest, benchmark, estimate, simulate, acf, sweep, phi.
// Every command accepts --config <json>; explicit flags override config
// values and the effective configuration is echoed into output metadata.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ismm/acf.hpp"
#include "ismm/io.hpp"
#include "ismm/renewal.hpp"
#include "ismm/rng.hpp"
#include "ismm/simulation.hpp"

using namespace ismm;

namespace {

// ---------------------------------------------------------------- logging

int log_threshold() {
  static const int threshold = [] {
    const char* env = std::getenv("ISMM_LOG");
    if (!env) return 1;
    const std::string level(env);
    if (level == "error") return 0;
    if (level == "warn") return 1;
    if (level == "info") return 2;
    if (level == "debug") return 3;
    return 1;
  }();
  return threshold;
}

void logmsg(int level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_threshold())
    std::fprintf(stderr, "ismm [%s] %s\n", names[level], msg.c_str());
}

// ------------------------------------------------------------- config glue

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  return Json::parse(read_file(path));
}

// Flags win over config-file values, which win over defaults (already held
// in the variable).
template <typename T>
void overlay(const CLI::App& cmd, const std::string& flag, const Json& cfg,
             const char* key, T& var) {
  if (cmd.count(flag) > 0) return;
  if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const Json& effective) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(effective.dump())));
  return buf;
}

void write_with_meta(const std::string& path, const std::string& content,
                     const Json& effective) {
  atomic_write_file(path, content);
  Json meta{{"config", effective}, {"config_hash", config_hash(effective)}};
  atomic_write_file(path + ".meta.json", meta.dump(2) + "\n");
}

[[noreturn]] void fail(const std::string& stage, int exit_code,
                       const std::string& error, const std::string& message) {
  const Json doc{{"stage", stage}, {"error", error}, {"message", message}};
  std::fprintf(stderr, "%s\n", doc.dump().c_str());
  std::exit(exit_code);
}

template <typename Fn>
void guarded(const std::string& stage, int exit_code, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    fail(stage, exit_code, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    fail(stage, exit_code, "Internal", e.what());
  }
}

PipelineOptions overlay_pipeline_options(const CLI::App& cmd, const Json& cfg,
                                         PipelineOptions opt) {
  overlay(cmd, "--S", cfg, "S", opt.S);
  overlay(cmd, "--V", cfg, "V", opt.V);
  overlay(cmd, "--t-max", cfg, "t_max", opt.t_max);
  overlay(cmd, "--min-visits", cfg, "min_visits", opt.min_visits);
  overlay(cmd, "--quantile-levels", cfg, "quantile_levels",
          opt.return_quantiles);
  bool every_minute = opt.convention == TransitionConvention::EveryMinute;
  overlay(cmd, "--every-minute-transitions", cfg, "every_minute_transitions",
          every_minute);
  opt.convention = every_minute ? TransitionConvention::EveryMinute
                                : TransitionConvention::OnChange;
  return opt;
}

Json pipeline_options_json(const PipelineOptions& opt) {
  return Json{{"S", opt.S},
              {"V", opt.V},
              {"t_max", opt.t_max},
              {"min_visits", opt.min_visits},
              {"quantile_levels", opt.return_quantiles.empty()
                                      ? default_quantile_levels(opt.S)
                                      : opt.return_quantiles},
              {"every_minute_transitions",
               opt.convention == TransitionConvention::EveryMinute}};
}

// ------------------------------------------------------------- subcommands

void run_ingest(const CLI::App& cmd, std::string config_path,
                std::string input, std::string calendar_path,
                std::string outdir, std::string instrument,
                bool simple_returns) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--input", cfg, "input", input);
  overlay(cmd, "--calendar", cfg, "calendar", calendar_path);
  overlay(cmd, "--outdir", cfg, "outdir", outdir);
  overlay(cmd, "--instrument", cfg, "instrument", instrument);
  overlay(cmd, "--simple-returns", cfg, "simple_returns", simple_returns);

  const TradingCalendar cal =
      calendar_from_json(Json::parse(read_file(calendar_path)));
  const TickSeries ticks = parse_ticks_file(input, instrument);
  logmsg(2, "parsed " + std::to_string(ticks.ticks.size()) + " ticks");

  std::vector<IngestWarning> warnings;
  const MinuteSeries minutes = resample_to_minutes(ticks, cal, &warnings);
  const ReturnSeries returns = compute_returns(
      minutes, simple_returns ? ReturnKind::Simple : ReturnKind::Log,
      &warnings);
  for (const auto& w : warnings)
    logmsg(1, format_day(w.date) + ": " + w.message);

  const Json effective{{"input", input},
                       {"calendar", calendar_path},
                       {"outdir", outdir},
                       {"instrument", instrument},
                       {"simple_returns", simple_returns}};
  write_with_meta(outdir + "/minutes.csv", minute_series_csv(minutes),
                  effective);
  write_with_meta(outdir + "/returns.csv", return_series_csv(returns),
                  effective);

  Json skipped = Json::array();
  for (const auto& w : warnings)
    skipped.push_back(Json{{"date", format_day(w.date)},
                           {"code", to_string(w.code)},
                           {"message", w.message}});
  Json per_day = Json::array();
  for (const auto& day : minutes.days)
    per_day.push_back(Json{{"date", format_day(day.date)},
                           {"minutes", day.prices.size()}});
  const Json report{{"instrument", instrument},
                    {"days", minutes.days.size()},
                    {"total_returns", returns.total_returns()},
                    {"skipped", std::move(skipped)},
                    {"minutes_per_day", std::move(per_day)},
                    {"calendar", to_json(cal)},
                    {"config", effective},
                    {"config_hash", config_hash(effective)}};
  atomic_write_file(outdir + "/ingest_report.json", report.dump(2) + "\n");
}

void run_benchmark(const CLI::App& cmd, std::string config_path,
                   RegimeParams params, std::uint64_t seed, std::string out) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--minutes", cfg, "minutes", params.minutes);
  overlay(cmd, "--rho", cfg, "rho", params.rho);
  overlay(cmd, "--sigma-low", cfg, "sigma_low", params.sigma_low);
  overlay(cmd, "--sigma-high", cfg, "sigma_high", params.sigma_high);
  overlay(cmd, "--day-length", cfg, "day_length", params.day_length);
  overlay(cmd, "--seed", cfg, "seed", seed);
  overlay(cmd, "--out", cfg, "out", out);

  const ReturnSeries data = make_regime_benchmark(params, seed);
  const Json effective{{"minutes", params.minutes},
                       {"rho", params.rho},
                       {"sigma_low", params.sigma_low},
                       {"sigma_high", params.sigma_high},
                       {"day_length", params.day_length},
                       {"seed", seed},
                       {"out", out}};
  write_with_meta(out, return_series_csv(data), effective);
  logmsg(2, "benchmark series of " + std::to_string(params.minutes) +
                " minutes written to " + out);
}

void run_estimate(const CLI::App& cmd, std::string config_path,
                  std::string returns_path, std::string out, int m,
                  PipelineOptions opt, std::string index_out,
                  std::string chain_out) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--returns", cfg, "returns", returns_path);
  overlay(cmd, "--out", cfg, "out", out);
  overlay(cmd, "--m", cfg, "m", m);
  overlay(cmd, "--index-out", cfg, "index_out", index_out);
  overlay(cmd, "--chain-out", cfg, "chain_out", chain_out);
  opt = overlay_pipeline_options(cmd, cfg, opt);

  const ReturnSeries data = return_series_from_csv(read_file(returns_path));
  const EstimationArtifacts artifacts = estimate_pipeline(data, m, opt);
  artifacts.kernel.check_invariants();  // self-check before anything lands
  logmsg(2, "kernel estimated from " +
                std::to_string(artifacts.chain.size()) + " transitions");

  Json effective = pipeline_options_json(opt);
  effective["returns"] = returns_path;
  effective["out"] = out;
  effective["m"] = m;

  Json doc = to_json(artifacts.kernel);
  doc["config"] = effective;
  doc["config_hash"] = config_hash(effective);
  doc["invariants"] = "pass";
  atomic_write_file(out, doc.dump() + "\n");

  if (!index_out.empty())
    write_with_meta(index_out,
                    index_values_csv(artifacts.chain, artifacts.index_values,
                                     artifacts.kernel.meta.index_binning),
                    effective);
  if (!chain_out.empty())
    write_with_meta(chain_out, chain_csv(artifacts.chain), effective);
}

void run_simulate(const CLI::App& cmd, std::string config_path,
                  std::string kernel_path, std::int64_t horizon,
                  std::uint64_t seed, std::string out, bool no_backoff,
                  int forced_level) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--kernel", cfg, "kernel", kernel_path);
  overlay(cmd, "--horizon", cfg, "horizon", horizon);
  overlay(cmd, "--seed", cfg, "seed", seed);
  overlay(cmd, "--out", cfg, "out", out);
  overlay(cmd, "--no-backoff", cfg, "no_backoff", no_backoff);
  overlay(cmd, "--forced-level", cfg, "forced_level", forced_level);

  const IndexedKernel kernel =
      kernel_from_json(Json::parse(read_file(kernel_path)));
  if (kernel.canonical_init.empty())
    throw Error(ErrorCode::InsufficientHistory,
                "kernel document carries no init history; estimate one from "
                "data or supply init via config");

  SimConfig sim_cfg;
  sim_cfg.horizon = horizon;
  sim_cfg.seed = seed;
  sim_cfg.init = kernel.canonical_init;
  sim_cfg.backoff_allowed = !no_backoff;
  if (forced_level >= 0) sim_cfg.forced_level = forced_level;

  const SimResult result = simulate(kernel, sim_cfg);
  std::size_t backoff_steps = 0;
  for (auto tag : result.provenance)
    if (tag == Provenance::Backoff) ++backoff_steps;
  logmsg(2, std::to_string(result.simulated_transitions) + " transitions, " +
                std::to_string(backoff_steps) + " via backoff");

  const Json effective{{"kernel", kernel_path}, {"horizon", horizon},
                       {"seed", seed},          {"out", out},
                       {"no_backoff", no_backoff},
                       {"forced_level", forced_level}};
  write_with_meta(out, sim_result_csv(result), effective);
}

void run_acf(const CLI::App& cmd, std::string config_path,
             std::string returns_path, std::string out, int tau_max, bool raw,
             std::vector<int> models, bool no_index, int replications,
             std::uint64_t seed, int threads, PipelineOptions opt) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--returns", cfg, "returns", returns_path);
  overlay(cmd, "--out", cfg, "out", out);
  overlay(cmd, "--tau-max", cfg, "tau_max", tau_max);
  overlay(cmd, "--raw", cfg, "raw", raw);
  overlay(cmd, "--models", cfg, "models", models);
  overlay(cmd, "--no-index", cfg, "no_index", no_index);
  overlay(cmd, "--replications", cfg, "replications", replications);
  overlay(cmd, "--seed", cfg, "seed", seed);
  overlay(cmd, "--threads", cfg, "threads", threads);
  opt = overlay_pipeline_options(cmd, cfg, opt);

  const ReturnSeries data = return_series_from_csv(read_file(returns_path));
  Json effective = pipeline_options_json(opt);
  effective["returns"] = returns_path;
  effective["out"] = out;
  effective["tau_max"] = tau_max;
  effective["raw"] = raw;
  effective["models"] = models;
  effective["no_index"] = no_index;
  effective["replications"] = replications;
  effective["seed"] = seed;

  if (models.empty() && !no_index) {
    const auto flat = data.concatenated();
    const AcfReport report = raw ? acf_raw(flat, tau_max, "data")
                                 : acf_squared(flat, tau_max, "data");
    write_with_meta(out, acf_csv(report), effective);
    return;
  }
  const ComparisonReport report = compare_models(
      data, models, no_index, replications, tau_max, seed, opt, threads);
  for (const auto& model : report.models)
    if (!model.ok) logmsg(1, model.label + " failed: " + model.error);
  write_with_meta(out, comparison_csv(report), effective);
}

void run_sweep(const CLI::App& cmd, std::string config_path,
               std::string returns_path, std::string outdir, int m_from,
               int m_to, int m_step, SweepConfig sweep_cfg,
               PipelineOptions opt) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--returns", cfg, "returns", returns_path);
  overlay(cmd, "--outdir", cfg, "outdir", outdir);
  overlay(cmd, "--m-from", cfg, "m_from", m_from);
  overlay(cmd, "--m-to", cfg, "m_to", m_to);
  overlay(cmd, "--m-step", cfg, "m_step", m_step);
  overlay(cmd, "--replications", cfg, "replications", sweep_cfg.replications);
  overlay(cmd, "--tau-max", cfg, "tau_max", sweep_cfg.tau_max);
  overlay(cmd, "--seed", cfg, "seed", sweep_cfg.seed);
  overlay(cmd, "--threads", cfg, "threads", sweep_cfg.threads);
  sweep_cfg.options = overlay_pipeline_options(cmd, cfg, opt);

  if (m_step < 1 || m_to < m_from)
    throw Error(ErrorCode::InvalidArgument, "bad m grid specification");
  sweep_cfg.m_grid.clear();
  for (int m = m_from; m <= m_to; m += m_step) sweep_cfg.m_grid.push_back(m);

  const ReturnSeries data = return_series_from_csv(read_file(returns_path));
  const SweepReport report = memory_sweep(data, sweep_cfg);
  for (const auto& entry : report.entries)
    if (!entry.ok)
      logmsg(1, "m=" + std::to_string(entry.m) + " failed: " + entry.error);
  logmsg(2, "best_m=" + std::to_string(report.best_m));

  Json effective = pipeline_options_json(sweep_cfg.options);
  effective["returns"] = returns_path;
  effective["outdir"] = outdir;
  effective["m_from"] = m_from;
  effective["m_to"] = m_to;
  effective["m_step"] = m_step;
  effective["replications"] = sweep_cfg.replications;
  effective["tau_max"] = sweep_cfg.tau_max;
  effective["seed"] = sweep_cfg.seed;

  write_with_meta(outdir + "/sweep.csv", sweep_csv(report), effective);
  Json summary = sweep_summary_json(report);
  summary["config"] = effective;
  summary["config_hash"] = config_hash(effective);
  atomic_write_file(outdir + "/sweep.json", summary.dump(2) + "\n");
}

void run_phi(const CLI::App& cmd, std::string config_path,
             std::string kernel_path, std::string query_path, std::string out,
             int replications, std::uint64_t seed) {
  const Json cfg = load_config(config_path);
  overlay(cmd, "--kernel", cfg, "kernel", kernel_path);
  overlay(cmd, "--query", cfg, "query", query_path);
  overlay(cmd, "--out", cfg, "out", out);
  overlay(cmd, "--replications", cfg, "replications", replications);
  overlay(cmd, "--seed", cfg, "seed", seed);

  const IndexedKernel kernel =
      kernel_path.empty()
          ? phi_toy_kernel()
          : kernel_from_json(Json::parse(read_file(kernel_path)));

  const Json effective{{"kernel", kernel_path.empty() ? "toy" : kernel_path},
                       {"query", query_path},
                       {"out", out},
                       {"replications", replications},
                       {"seed", seed}};

  if (!query_path.empty()) {
    const Json qj = Json::parse(read_file(query_path));
    PhiQuery q;
    q.states = qj.at("states").get<std::vector<int>>();
    q.times = qj.at("times").get<std::vector<std::int64_t>>();
    q.target = qj.at("target").get<int>();
    q.horizon = qj.at("horizon").get<int>();
    q.v_cap = qj.value("v_cap", std::numeric_limits<double>::infinity());
    const double value = solve_phi(kernel, q);
    Json result{{"phi", value},
                {"query", qj},
                {"config", effective},
                {"config_hash", config_hash(effective)}};
    atomic_write_file(out, result.dump(2) + "\n");
    return;
  }

  // Solver-vs-simulator comparison grid at 3 MC standard errors per row.
  const std::vector<PhiGridRow> rows =
      phi_comparison_grid(kernel, replications, seed);
  std::string csv = "id,horizon,target,v_cap,phi,mc,mc_se,abs_diff,pass\n";
  bool all_pass = true;
  for (const auto& row : rows) {
    all_pass = all_pass && row.pass;
    csv += std::to_string(row.id) + ',' + std::to_string(row.query.horizon) +
           ',' + std::to_string(row.query.target) + ',' +
           (std::isinf(row.query.v_cap) ? "inf"
                                        : format_double(row.query.v_cap)) +
           ',' + format_double(row.phi) + ',' + format_double(row.mc) + ',' +
           format_double(row.mc_se) + ',' +
           format_double(std::abs(row.phi - row.mc)) + ',' +
           (row.pass ? "PASS" : "FAIL") + '\n';
    logmsg(2, "query " + std::to_string(row.id) +
                  (row.pass ? " PASS" : " FAIL"));
  }
  write_with_meta(out, csv, effective);
  if (!all_pass)
    throw Error(ErrorCode::InvalidArgument,
                "solver-vs-simulator grid has failing rows; see " + out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indexed semi-Markov model of intraday returns"};
  app.require_subcommand(1);

  // --- ingest ---------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "Resample tick CSV to 1-minute bars and returns");
  std::string in_config, in_input, in_calendar, in_outdir, in_instrument;
  bool in_simple = false;
  ingest->add_option("--config", in_config);
  ingest->add_option("--input", in_input, "tick CSV (timestamp,price)");
  ingest->add_option("--calendar", in_calendar, "trading calendar JSON");
  ingest->add_option("--outdir", in_outdir);
  ingest->add_option("--instrument", in_instrument);
  ingest->add_flag("--simple-returns", in_simple);
  ingest->callback([&] {
    guarded("ingest", 2, [&] {
      run_ingest(*ingest, in_config, in_input, in_calendar, in_outdir,
                 in_instrument, in_simple);
    });
  });

  // --- benchmark ------------------------------------------------------
  auto* benchmark = app.add_subcommand(
      "benchmark", "Generate the synthetic two-regime return series");
  std::string bm_config, bm_out = "benchmark_returns.csv";
  RegimeParams bm_params;
  bm_params.minutes = 500000;
  std::uint64_t bm_seed = 0;
  benchmark->add_option("--config", bm_config);
  benchmark->add_option("--minutes", bm_params.minutes);
  benchmark->add_option("--rho", bm_params.rho);
  benchmark->add_option("--sigma-low", bm_params.sigma_low);
  benchmark->add_option("--sigma-high", bm_params.sigma_high);
  benchmark->add_option("--day-length", bm_params.day_length);
  benchmark->add_option("--seed", bm_seed);
  benchmark->add_option("--out", bm_out);
  benchmark->callback([&] {
    guarded("benchmark", 4, [&] {
      run_benchmark(*benchmark, bm_config, bm_params, bm_seed, bm_out);
    });
  });

  // --- estimate -------------------------------------------------------
  auto* estimate = app.add_subcommand(
      "estimate", "Estimate the indexed semi-Markov kernel from returns");
  std::string es_config, es_returns, es_out = "kernel.json";
  std::string es_index_out, es_chain_out;
  int es_m = 30;
  PipelineOptions es_opt;
  bool es_every_minute = false;
  estimate->add_option("--config", es_config);
  estimate->add_option("--returns", es_returns, "returns CSV from ingest");
  estimate->add_option("--out", es_out, "kernel JSON path");
  estimate->add_option("--m", es_m, "memory in transitions");
  estimate->add_option("--S", es_opt.S);
  estimate->add_option("--V", es_opt.V);
  estimate->add_option("--t-max", es_opt.t_max);
  estimate->add_option("--min-visits", es_opt.min_visits);
  estimate->add_option("--quantile-levels", es_opt.return_quantiles)
      ->delimiter(',');
  estimate->add_flag("--every-minute-transitions", es_every_minute);
  estimate->add_option("--index-out", es_index_out);
  estimate->add_option("--chain-out", es_chain_out);
  estimate->callback([&] {
    guarded("estimate", 3, [&] {
      if (es_every_minute)
        es_opt.convention = TransitionConvention::EveryMinute;
      run_estimate(*estimate, es_config, es_returns, es_out, es_m, es_opt,
                   es_index_out, es_chain_out);
    });
  });

  // --- simulate -------------------------------------------------------
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Simulate a synthetic series from an estimated kernel");
  std::string si_config, si_kernel, si_out = "sim.csv";
  std::int64_t si_horizon = 0;
  std::uint64_t si_seed = 0;
  bool si_no_backoff = false;
  int si_forced_level = -1;
  simulate_cmd->add_option("--config", si_config);
  simulate_cmd->add_option("--kernel", si_kernel);
  simulate_cmd->add_option("--horizon", si_horizon, "minutes to simulate");
  simulate_cmd->add_option("--seed", si_seed);
  simulate_cmd->add_option("--out", si_out);
  simulate_cmd->add_flag("--no-backoff", si_no_backoff);
  simulate_cmd->add_option("--forced-level", si_forced_level)
      ->description("diagnostic: pin the volatility level");
  simulate_cmd->callback([&] {
    guarded("simulate", 4, [&] {
      run_simulate(*simulate_cmd, si_config, si_kernel, si_horizon, si_seed,
                   si_out, si_no_backoff, si_forced_level);
    });
  });

  // --- acf --------------------------------------------------------------
  auto* acf = app.add_subcommand(
      "acf", "Autocorrelation of squared returns; optionally model curves");
  std::string ac_config, ac_returns, ac_out = "acf.csv";
  int ac_tau_max = 100, ac_replications = 10, ac_threads = 0;
  bool ac_raw = false, ac_no_index = false;
  std::vector<int> ac_models;
  std::uint64_t ac_seed = 0;
  PipelineOptions ac_opt;
  acf->add_option("--config", ac_config);
  acf->add_option("--returns", ac_returns);
  acf->add_option("--out", ac_out);
  acf->add_option("--tau-max", ac_tau_max);
  acf->add_flag("--raw", ac_raw, "raw-return autocorrelation instead");
  acf->add_option("--models", ac_models, "m values to simulate and compare")
      ->delimiter(',');
  acf->add_flag("--no-index", ac_no_index, "include the plain model");
  acf->add_option("--replications", ac_replications);
  acf->add_option("--seed", ac_seed);
  acf->add_option("--threads", ac_threads);
  bool ac_every_minute = false;
  acf->add_option("--S", ac_opt.S);
  acf->add_option("--V", ac_opt.V);
  acf->add_option("--t-max", ac_opt.t_max);
  acf->add_option("--min-visits", ac_opt.min_visits);
  acf->add_option("--quantile-levels", ac_opt.return_quantiles)
      ->delimiter(',');
  acf->add_flag("--every-minute-transitions", ac_every_minute);
  acf->callback([&] {
    guarded("acf", 5, [&] {
      if (ac_every_minute)
        ac_opt.convention = TransitionConvention::EveryMinute;
      run_acf(*acf, ac_config, ac_returns, ac_out, ac_tau_max, ac_raw,
              ac_models, ac_no_index, ac_replications, ac_seed, ac_threads,
              ac_opt);
    });
  });

  // --- sweep ------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Memory sweep: MSE of model vs data ACF per m");
  std::string sw_config, sw_returns, sw_outdir = ".";
  int sw_from = 5, sw_to = 200, sw_step = 5;
  SweepConfig sw_cfg;
  PipelineOptions sw_opt;
  sweep->add_option("--config", sw_config);
  sweep->add_option("--returns", sw_returns);
  sweep->add_option("--outdir", sw_outdir);
  sweep->add_option("--m-from", sw_from);
  sweep->add_option("--m-to", sw_to);
  sweep->add_option("--m-step", sw_step);
  sweep->add_option("--replications", sw_cfg.replications);
  sweep->add_option("--tau-max", sw_cfg.tau_max);
  sweep->add_option("--seed", sw_cfg.seed);
  sweep->add_option("--threads", sw_cfg.threads);
  bool sw_every_minute = false;
  sweep->add_option("--S", sw_opt.S);
  sweep->add_option("--V", sw_opt.V);
  sweep->add_option("--t-max", sw_opt.t_max);
  sweep->add_option("--min-visits", sw_opt.min_visits);
  sweep->add_option("--quantile-levels", sw_opt.return_quantiles)
      ->delimiter(',');
  sweep->add_flag("--every-minute-transitions", sw_every_minute);
  sweep->callback([&] {
    guarded("sweep", 6, [&] {
      if (sw_every_minute)
        sw_opt.convention = TransitionConvention::EveryMinute;
      run_sweep(*sweep, sw_config, sw_returns, sw_outdir, sw_from, sw_to,
                sw_step, sw_cfg, sw_opt);
    });
  });

  // --- phi --------------------------------------------------------------
  auto* phi = app.add_subcommand(
      "phi", "Renewal-equation solver; default: solver-vs-simulator grid");
  std::string ph_config, ph_kernel, ph_query, ph_out = "phi.csv";
  int ph_replications = 100000;
  std::uint64_t ph_seed = 0;
  phi->add_option("--config", ph_config);
  phi->add_option("--kernel", ph_kernel, "kernel JSON (default: toy kernel)");
  phi->add_option("--query", ph_query, "single query JSON instead of grid");
  phi->add_option("--out", ph_out);
  phi->add_option("--replications", ph_replications);
  phi->add_option("--seed", ph_seed);
  phi->callback([&] {
    guarded("phi", 6, [&] {
      run_phi(*phi, ph_config, ph_kernel, ph_query, ph_out, ph_replications,
              ph_seed);
    });
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
