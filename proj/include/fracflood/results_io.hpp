#pragma once

#include "fracflood/simulator.hpp"

#include <ostream>
#include <string>

namespace fracflood {

/// Column names of the results CSV, in order.
std::vector<std::string> series_header(const TimeSeries& series);

/// Results table: time_days, per-well columns, field_avg_p_MPa, field_p_coeff.
/// Numbers use the shortest round-trip form, so equal series give equal text.
void write_series_csv(const TimeSeries& series, std::ostream& out);
std::string series_csv(const TimeSeries& series);

/// Deterministic run summary (convergence counts, chops, material balance,
/// stage ends, cumulative volumes). Wall time is kept out of it; see timing_json.
std::string summary_json(const RunResult& result);
std::string timing_json(const RunResult& result);

} // namespace fracflood
