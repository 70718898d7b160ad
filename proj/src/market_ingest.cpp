#include "ismm/market_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace ismm {

namespace {

// Stable sort tolerance for late ticks, per the ingest contract.
constexpr std::int64_t kDisorderToleranceMs = 1000;

bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int_field(std::string_view text, int& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

DayNumber day_of(TimestampMs ts) {
  // Floor division; exchange-local timestamps are never negative in practice
  // but keep this correct anyway.
  return static_cast<DayNumber>(ts >= 0 ? ts / kMsPerDay
                                        : (ts - kMsPerDay + 1) / kMsPerDay);
}

DayNumber make_day(int year, int month, int day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                           std::chrono::day{unsigned(day)}};
  return static_cast<DayNumber>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_day(DayNumber day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

DayNumber parse_day(const std::string& text) {
  int y = 0, mo = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_int_field(text.substr(0, 4), y) ||
      !parse_int_field(text.substr(5, 2), mo) ||
      !parse_int_field(text.substr(8, 2), d)) {
    throw Error(ErrorCode::MalformedRow, "bad date '" + text + "'");
  }
  return make_day(y, mo, d);
}

bool parse_iso8601(const std::string& text, TimestampMs& out) {
  // YYYY-MM-DD[T ]HH:MM:SS[.fff]
  if (text.size() < 19) return false;
  if (text[4] != '-' || text[7] != '-') return false;
  const char sep = text[10];
  if (sep != 'T' && sep != ' ') return false;
  if (text[13] != ':' || text[16] != ':') return false;

  int y, mo, d, h, mi, s;
  if (!parse_int_field({text.data(), 4}, y) ||
      !parse_int_field({text.data() + 5, 2}, mo) ||
      !parse_int_field({text.data() + 8, 2}, d) ||
      !parse_int_field({text.data() + 11, 2}, h) ||
      !parse_int_field({text.data() + 14, 2}, mi) ||
      !parse_int_field({text.data() + 17, 2}, s)) {
    return false;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
    return false;

  std::int64_t ms = 0;
  if (text.size() > 19) {
    if (text[19] != '.' || text.size() > 23 || text.size() == 20) return false;
    int frac = 0;
    if (!parse_int_field({text.data() + 20, text.size() - 20}, frac))
      return false;
    // pad to milliseconds: ".5" == 500ms
    for (std::size_t digits = text.size() - 20; digits < 3; ++digits) frac *= 10;
    ms = frac;
  }

  out = static_cast<std::int64_t>(make_day(y, mo, d)) * kMsPerDay +
        ((h * 60 + mi) * 60 + s) * 1000LL + ms;
  return true;
}

void TradingCalendar::validate() const {
  if (continuous_start >= continuous_end ||
      pre_change_continuous_start >= continuous_end) {
    throw Error(ErrorCode::InvalidArgument,
                "calendar: continuous_start must precede continuous_end");
  }
  if (session_open > continuous_start &&
      session_open > pre_change_continuous_start) {
    throw Error(ErrorCode::InvalidArgument,
                "calendar: session_open after continuous trading start");
  }
}

std::vector<double> ReturnSeries::concatenated() const {
  std::vector<double> out;
  out.reserve(total_returns());
  for (const auto& d : days)
    out.insert(out.end(), d.returns.begin(), d.returns.end());
  return out;
}

TickSeries parse_ticks(std::istream& in, const std::string& instrument) {
  TickSeries series;
  series.instrument = instrument;

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  TimestampMs max_ts = INT64_MIN;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!saw_header) {
      if (row != "timestamp,price") {
        throw Error(ErrorCode::MalformedRow,
                    "line 1: expected header 'timestamp,price'");
      }
      saw_header = true;
      continue;
    }

    const auto comma = row.find(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": missing comma");
    }
    const std::string ts_text{trim(row.substr(0, comma))};
    const std::string_view price_text = trim(row.substr(comma + 1));

    TimestampMs ts;
    if (!parse_iso8601(ts_text, ts)) {
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": bad timestamp '" +
                      ts_text + "'");
    }
    double price;
    if (!parse_double(price_text, price)) {
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no) + ": bad price");
    }
    if (!(price > 0.0) || !std::isfinite(price)) {
      throw Error(ErrorCode::NonPositivePrice,
                  "line " + std::to_string(line_no) + ": price " +
                      std::to_string(price));
    }
    if (max_ts != INT64_MIN && ts < max_ts - kDisorderToleranceMs) {
      throw Error(ErrorCode::DisorderedTicks,
                  "line " + std::to_string(line_no) +
                      ": timestamp more than 1s before a previous row");
    }
    max_ts = std::max(max_ts, ts);
    series.ticks.push_back({ts, price});
  }

  if (!saw_header || series.ticks.empty())
    throw Error(ErrorCode::EmptyInput, "no tick rows");

  std::stable_sort(series.ticks.begin(), series.ticks.end(),
                   [](const Tick& a, const Tick& b) { return a.ts < b.ts; });
  return series;
}

TickSeries parse_ticks_file(const std::string& path,
                            const std::string& instrument) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return parse_ticks(in, instrument);
}

MinuteSeries resample_to_minutes(const TickSeries& ticks,
                                 const TradingCalendar& cal,
                                 std::vector<IngestWarning>* warnings) {
  cal.validate();
  if (ticks.ticks.empty()) throw Error(ErrorCode::EmptyInput, "no ticks");

  MinuteSeries out;
  out.instrument = ticks.instrument;

  std::size_t pos = 0;
  const auto& all = ticks.ticks;
  while (pos < all.size()) {
    const DayNumber date = day_of(all[pos].ts);
    std::size_t end = pos;
    while (end < all.size() && day_of(all[end].ts) == date) ++end;

    const std::int64_t day_ms = static_cast<std::int64_t>(date) * kMsPerDay;
    const int cs = cal.continuous_start_for(date);
    const int n_cont = cal.continuous_minutes_for(date);
    const auto boundary = [&](int t) {  // t in 1..n_cont
      return day_ms + (cs + t) * kMsPerMinute;
    };

    // Last tick strictly before each boundary, found by a single merge scan.
    // last_before[t] indexes into `all`, or -1 when no trade precedes t.
    std::vector<std::ptrdiff_t> last_before(n_cont + 1, -1);
    {
      std::size_t i = pos;
      for (int t = 1; t <= n_cont; ++t) {
        while (i < end && all[i].ts < boundary(t)) ++i;
        last_before[t] = (i > pos) ? std::ptrdiff_t(i - 1) : -1;
      }
    }

    const TimestampMs last_tick_ts = all[end - 1].ts;
    const bool has_close = last_tick_ts >= boundary(n_cont);

    int first_eff = 1;
    while (first_eff <= n_cont && last_before[first_eff] < 0) ++first_eff;

    int last_eff;
    if (has_close) {
      last_eff = n_cont;
    } else {
      // Ends early: keep boundaries up to the first one past the last tick.
      last_eff = first_eff;
      while (last_eff < n_cont && boundary(last_eff) <= last_tick_ts)
        ++last_eff;
    }

    if (first_eff > n_cont) {
      if (warnings) {
        warnings->push_back({date, ErrorCode::MissingOpen,
                             "no trade before any continuous minute on " +
                                 format_day(date)});
      }
      pos = end;
      continue;
    }

    DayRecord rec;
    rec.date = date;
    rec.prices.reserve(std::size_t(last_eff - first_eff + 1) + 2);

    // Opening auction entry: the day's first print, when it happens before
    // continuous trading's first boundary.
    if (all[pos].ts < boundary(1)) {
      rec.prices.push_back(all[pos].price);
    }
    for (int t = first_eff; t <= last_eff; ++t)
      rec.prices.push_back(all[std::size_t(last_before[t])].price);
    // Closing auction entry: last trade at/after the final boundary.
    if (has_close) rec.prices.push_back(all[end - 1].price);

    out.days.push_back(std::move(rec));
    pos = end;
  }

  if (out.days.empty())
    throw Error(ErrorCode::EmptyInput, "no usable trading days");
  return out;
}

ReturnSeries compute_returns(const MinuteSeries& ms, ReturnKind kind,
                             std::vector<IngestWarning>* warnings) {
  ReturnSeries out;
  out.instrument = ms.instrument;
  for (const auto& day : ms.days) {
    if (day.prices.size() < 2) {
      if (warnings) {
        warnings->push_back({day.date, ErrorCode::InsufficientData,
                             "day " + format_day(day.date) +
                                 " shorter than 2 minutes, skipped"});
      }
      continue;
    }
    ReturnDay rd;
    rd.date = day.date;
    rd.returns.resize(day.prices.size() - 1);
    for (std::size_t t = 0; t + 1 < day.prices.size(); ++t) {
      const double ratio = day.prices[t + 1] / day.prices[t];
      rd.returns[t] = kind == ReturnKind::Log ? std::log(ratio) : ratio - 1.0;
    }
    out.days.push_back(std::move(rd));
  }
  return out;
}

}  // namespace ismm
