#ifndef ISMM_MARKET_INGEST_HPP
#define ISMM_MARKET_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ismm/errors.hpp"

namespace ismm {

// Timestamps are exchange-local, encoded as milliseconds since the civil
// epoch 1970-01-01 00:00:00. Dates are civil day numbers (ms / 86'400'000).
using TimestampMs = std::int64_t;
using DayNumber = std::int32_t;

constexpr std::int64_t kMsPerMinute = 60'000;
constexpr std::int64_t kMsPerDay = 86'400'000;

DayNumber day_of(TimestampMs ts);
DayNumber make_day(int year, int month, int day);
std::string format_day(DayNumber day);

// Parses "YYYY-MM-DD". Throws Error(MalformedRow) on bad input.
DayNumber parse_day(const std::string& text);

// Parses ISO-8601 "YYYY-MM-DD[T ]HH:MM:SS[.fff]". Returns false on failure.
bool parse_iso8601(const std::string& text, TimestampMs& out);

struct Tick {
  TimestampMs ts;
  double price;
};

struct TickSeries {
  std::string instrument;
  std::vector<Tick> ticks;  // non-decreasing timestamps, positive prices
};

// Session clock of the exchange, minutes from midnight. Continuous trading
// starts later before `regime_change_date` (the 2009-09-28 rule).
struct TradingCalendar {
  int session_open = 9 * 60;
  int continuous_start = 9 * 60;
  int continuous_end = 17 * 60 + 25;
  DayNumber regime_change_date = 0;
  int pre_change_continuous_start = 9 * 60 + 5;

  int continuous_start_for(DayNumber day) const {
    return day < regime_change_date ? pre_change_continuous_start
                                    : continuous_start;
  }
  // Number of continuous-trading minute slots; the full day record adds the
  // opening and closing auction entries on top (505 + 2 = 507 post-change).
  int continuous_minutes_for(DayNumber day) const {
    return continuous_end - continuous_start_for(day);
  }
  void validate() const;
};

struct DayRecord {
  DayNumber date;
  std::vector<double> prices;  // one per effective trading minute
};

struct MinuteSeries {
  std::string instrument;
  std::vector<DayRecord> days;
};

struct ReturnDay {
  DayNumber date;
  std::vector<double> returns;
};

struct ReturnSeries {
  std::string instrument;
  std::vector<ReturnDay> days;

  std::size_t total_returns() const {
    std::size_t n = 0;
    for (const auto& d : days) n += d.returns.size();
    return n;
  }
  // Day structure flattened into one vector (concatenated minute clock).
  std::vector<double> concatenated() const;
};

struct IngestWarning {
  DayNumber date;
  ErrorCode code;
  std::string message;
};

enum class ReturnKind { Log, Simple };

// CSV with header "timestamp,price". Rows out of order by at most one second
// are stably re-sorted; larger disorder is a hard error.
TickSeries parse_ticks(std::istream& in, const std::string& instrument = "");
TickSeries parse_ticks_file(const std::string& path,
                            const std::string& instrument = "");

// Resamples ticks onto the per-day minute grid: entry 0 is the opening
// auction price (last trade before the first continuous boundary), entry t
// the last trade strictly before boundary t, the final entry the closing
// auction price when a trade at/after the last boundary exists. Minutes with
// no trades carry the previous price forward; leading minutes before the
// first trade and trailing minutes after the last trade are dropped. Days
// with no usable minutes are skipped and reported through `warnings`.
MinuteSeries resample_to_minutes(const TickSeries& ticks,
                                 const TradingCalendar& cal,
                                 std::vector<IngestWarning>* warnings = nullptr);

// Per-day returns r_t = ln(S(t+1)/S(t)) (or the simple ratio minus one).
// Never spans an overnight boundary. Days shorter than 2 minutes are skipped
// with a warning.
ReturnSeries compute_returns(const MinuteSeries& ms,
                             ReturnKind kind = ReturnKind::Log,
                             std::vector<IngestWarning>* warnings = nullptr);

}  // namespace ismm

#endif  // ISMM_MARKET_INGEST_HPP
