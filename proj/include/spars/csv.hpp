#pragma once

#include <optional>
#include <string>

#include "spars/series.hpp"

namespace spars {

/// One sample per row, either a single numeric column or a timestamp,value
/// pair. A header row is auto-detected by a non-numeric first cell.
/// `value_column` selects the column by name (header required) or by 0-based
/// index when it parses as an integer; default is the last column.
TimeSeries read_series_csv(const std::string& path,
                           const std::optional<std::string>& value_column = std::nullopt);

void write_series_csv(const TimeSeries& series, const std::string& path);

}  // namespace spars
