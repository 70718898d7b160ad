#ifndef ISMM_IO_HPP
#define ISMM_IO_HPP

#include <string>

#include "json.hpp"

#include "ismm/acf.hpp"
#include "ismm/kernel.hpp"
#include "ismm/simulation.hpp"

namespace ismm {

using Json = nlohmann::json;

// Writes via a temp file in the same directory plus rename, so concurrent
// invocations never observe a half-written output.
void atomic_write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

Json to_json(const ReturnBinning& bins);
ReturnBinning return_binning_from_json(const Json& j);

Json to_json(const IndexBinning& bins);
IndexBinning index_binning_from_json(const Json& j);

Json to_json(const IndexedKernel& kernel);
IndexedKernel kernel_from_json(const Json& j);

// Calendar JSON: times as "HH:MM", regime_change_date as "YYYY-MM-DD".
TradingCalendar calendar_from_json(const Json& j);
Json to_json(const TradingCalendar& cal);

// CSV renderings of the pipeline artifacts.
std::string minute_series_csv(const MinuteSeries& ms);
std::string return_series_csv(const ReturnSeries& rs);
ReturnSeries return_series_from_csv(const std::string& content,
                                    const std::string& instrument = "");
std::string chain_csv(const EmbeddedChain& chain);
std::string index_values_csv(const EmbeddedChain& chain,
                             std::span<const double> values,
                             const IndexBinning& bins);
std::string acf_csv(const AcfReport& report);
std::string sim_result_csv(const SimResult& result);
std::string sweep_csv(const SweepReport& report);
Json sweep_summary_json(const SweepReport& report);
std::string comparison_csv(const ComparisonReport& report);

// Number formatting used by every CSV writer: shortest representation that
// round-trips a double, locale-independent.
std::string format_double(double v);

}  // namespace ismm

#endif  // ISMM_IO_HPP
