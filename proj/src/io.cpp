#include "ismm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ismm {

namespace {

int parse_hhmm(const std::string& text) {
  int h = 0, m = 0;
  if (text.size() != 5 || text[2] != ':' ||
      std::sscanf(text.c_str(), "%d:%d", &h, &m) != 2 || h > 23 || m > 59)
    throw Error(ErrorCode::InvalidArgument, "bad time-of-day '" + text + "'");
  return h * 60 + m;
}

std::string format_hhmm(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  // %.17g round-trips any double; trim to %.15g first when it is exact.
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  double back = 0.0;
  std::from_chars(buf, buf + std::strlen(buf), back);
  if (back != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush())
      throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::IoError,
                "rename to " + path + " failed: " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json to_json(const ReturnBinning& bins) {
  return Json{{"boundaries", bins.boundaries},
              {"representatives", bins.representatives}};
}

ReturnBinning return_binning_from_json(const Json& j) {
  ReturnBinning bins;
  bins.boundaries = j.at("boundaries").get<std::vector<double>>();
  bins.representatives = j.at("representatives").get<std::vector<double>>();
  bins.validate();
  return bins;
}

Json to_json(const IndexBinning& bins) {
  return Json{{"boundaries", bins.boundaries}};
}

IndexBinning index_binning_from_json(const Json& j) {
  IndexBinning bins;
  bins.boundaries = j.at("boundaries").get<std::vector<double>>();
  bins.validate();
  return bins;
}

Json to_json(const IndexedKernel& kernel) {
  const KernelMeta& meta = kernel.meta;
  Json j{{"schema", "ismm-kernel/1"},
         {"S", meta.S},
         {"V", meta.V},
         {"m", meta.m},
         {"t_max", meta.t_max},
         {"min_visits", meta.min_visits},
         {"burn_in", meta.burn_in()},
         {"convention", meta.convention == TransitionConvention::OnChange
                            ? "on-change"
                            : "every-minute"},
         {"return_binning", to_json(meta.return_binning)},
         {"index_binning", to_json(meta.index_binning)},
         {"visits", kernel.visits},
         {"p", kernel.p},
         {"q", kernel.q},
         {"backoff_visits", kernel.backoff_visits},
         {"backoff_p", kernel.backoff_p},
         {"backoff_q", kernel.backoff_q}};
  if (!kernel.counts.empty()) j["counts"] = kernel.counts;
  if (!kernel.canonical_init.empty()) {
    Json init = Json::array();
    for (const auto& ts : kernel.canonical_init)
      init.push_back(Json::array({ts.state, ts.time}));
    j["init"] = std::move(init);
  }
  return j;
}

IndexedKernel kernel_from_json(const Json& j) {
  if (j.value("schema", "") != "ismm-kernel/1")
    throw Error(ErrorCode::InvalidArgument, "not an ismm kernel document");
  IndexedKernel k;
  k.meta.S = j.at("S").get<int>();
  k.meta.V = j.at("V").get<int>();
  k.meta.m = j.at("m").get<int>();
  k.meta.t_max = j.at("t_max").get<int>();
  k.meta.min_visits = j.at("min_visits").get<int>();
  k.meta.convention = j.at("convention").get<std::string>() == "on-change"
                          ? TransitionConvention::OnChange
                          : TransitionConvention::EveryMinute;
  k.meta.return_binning = return_binning_from_json(j.at("return_binning"));
  k.meta.index_binning = index_binning_from_json(j.at("index_binning"));
  k.visits = j.at("visits").get<std::vector<std::int64_t>>();
  k.p = j.at("p").get<std::vector<double>>();
  k.q = j.at("q").get<std::vector<double>>();
  k.backoff_visits = j.at("backoff_visits").get<std::vector<std::int64_t>>();
  k.backoff_p = j.at("backoff_p").get<std::vector<double>>();
  k.backoff_q = j.at("backoff_q").get<std::vector<double>>();
  if (j.contains("counts"))
    k.counts = j.at("counts").get<std::vector<std::int64_t>>();
  if (j.contains("init")) {
    for (const auto& pair : j.at("init"))
      k.canonical_init.push_back(
          {pair.at(0).get<int>(), pair.at(1).get<std::int64_t>()});
  }
  k.check_invariants();
  return k;
}

TradingCalendar calendar_from_json(const Json& j) {
  TradingCalendar cal;
  cal.session_open = parse_hhmm(j.at("session_open").get<std::string>());
  cal.continuous_start =
      parse_hhmm(j.at("continuous_start").get<std::string>());
  cal.continuous_end = parse_hhmm(j.at("continuous_end").get<std::string>());
  cal.regime_change_date =
      parse_day(j.at("regime_change_date").get<std::string>());
  cal.pre_change_continuous_start =
      parse_hhmm(j.at("pre_change_continuous_start").get<std::string>());
  cal.validate();
  return cal;
}

Json to_json(const TradingCalendar& cal) {
  return Json{
      {"session_open", format_hhmm(cal.session_open)},
      {"continuous_start", format_hhmm(cal.continuous_start)},
      {"continuous_end", format_hhmm(cal.continuous_end)},
      {"regime_change_date", format_day(cal.regime_change_date)},
      {"pre_change_continuous_start",
       format_hhmm(cal.pre_change_continuous_start)}};
}

std::string minute_series_csv(const MinuteSeries& ms) {
  std::string out = "date,minute_index,price\n";
  for (const auto& day : ms.days) {
    const std::string date = format_day(day.date);
    for (std::size_t t = 0; t < day.prices.size(); ++t) {
      out += date;
      out += ',';
      out += std::to_string(t);
      out += ',';
      out += format_double(day.prices[t]);
      out += '\n';
    }
  }
  return out;
}

std::string return_series_csv(const ReturnSeries& rs) {
  std::string out = "date,minute_index,return\n";
  for (const auto& day : rs.days) {
    const std::string date = format_day(day.date);
    for (std::size_t t = 0; t < day.returns.size(); ++t) {
      out += date;
      out += ',';
      out += std::to_string(t);
      out += ',';
      out += format_double(day.returns[t]);
      out += '\n';
    }
  }
  return out;
}

ReturnSeries return_series_from_csv(const std::string& content,
                                    const std::string& instrument) {
  ReturnSeries rs;
  rs.instrument = instrument;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  std::string current_date;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "date,minute_index,return")
        throw Error(ErrorCode::MalformedRow,
                    "expected header 'date,minute_index,return'");
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": want 3 columns");
    const std::string date = line.substr(0, c1);
    const std::string value = line.substr(c2 + 1);
    double r = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), r);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": bad return");
    if (date != current_date) {
      ReturnDay day;
      day.date = parse_day(date);
      rs.days.push_back(std::move(day));
      current_date = date;
    }
    rs.days.back().returns.push_back(r);
  }
  if (rs.days.empty()) throw Error(ErrorCode::EmptyInput, "no return rows");
  return rs;
}

std::string chain_csv(const EmbeddedChain& chain) {
  std::string out = "n,J,T\n";
  for (std::size_t n = 0; n < chain.size(); ++n) {
    out += std::to_string(n);
    out += ',';
    out += std::to_string(chain.states[n]);
    out += ',';
    out += std::to_string(chain.times[n]);
    out += '\n';
  }
  return out;
}

std::string index_values_csv(const EmbeddedChain& chain,
                             std::span<const double> values,
                             const IndexBinning& bins) {
  std::string out = "n,T,U,level\n";
  for (std::size_t n = 0; n < chain.size() && n < values.size(); ++n) {
    if (!std::isfinite(values[n])) continue;  // burn-in entries
    out += std::to_string(n);
    out += ',';
    out += std::to_string(chain.times[n]);
    out += ',';
    out += format_double(values[n]);
    out += ',';
    out += std::to_string(discretize_index(values[n], bins));
    out += '\n';
  }
  return out;
}

std::string acf_csv(const AcfReport& report) {
  std::string out = "tau,sigma\n";
  for (std::size_t k = 0; k < report.taus.size(); ++k) {
    out += std::to_string(report.taus[k]);
    out += ',';
    out += format_double(report.sigma[k]);
    out += '\n';
  }
  return out;
}

std::string sim_result_csv(const SimResult& result) {
  std::string out = "minute,state,return\n";
  for (std::size_t t = 0; t < result.minute_states.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    out += std::to_string(result.minute_states[t]);
    out += ',';
    out += format_double(result.minute_returns[t]);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "m,mse\n";
  for (const auto& entry : report.entries) {
    out += std::to_string(entry.m);
    out += ',';
    out += entry.ok ? format_double(entry.mse) : std::string("nan");
    out += '\n';
  }
  return out;
}

Json sweep_summary_json(const SweepReport& report) {
  Json entries = Json::array();
  for (const auto& entry : report.entries) {
    Json e{{"m", entry.m}, {"ok", entry.ok}};
    if (entry.ok)
      e["mse"] = entry.mse;
    else
      e["error"] = entry.error;
    entries.push_back(std::move(e));
  }
  return Json{{"best_m", report.best_m},
              {"best_mse", report.best_mse},
              {"replications", report.replications},
              {"tau_max", report.tau_max},
              {"seed", report.seed},
              {"entries", std::move(entries)}};
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "tau,data";
  for (const auto& model : report.models) {
    out += ',';
    out += model.label;
  }
  out += '\n';
  for (std::size_t k = 0; k < report.taus.size(); ++k) {
    out += std::to_string(report.taus[k]);
    out += ',';
    out += format_double(report.data.sigma[k]);
    for (const auto& model : report.models) {
      out += ',';
      out += model.ok ? format_double(model.sigma[k]) : std::string("nan");
    }
    out += '\n';
  }
  return out;
}

}  // namespace ismm
