#pragma once

// CSV ingestion and plain-file exports.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace switchvol {

/// Dated values with strictly increasing ISO-8601 dates.
struct DatedSeries {
  std::vector<std::string> dates;
  std::vector<double> values;
  std::string source;

  std::size_t size() const { return values.size(); }
};

using ReturnSeries = DatedSeries;

/// Reads a `date,price` CSV. Errors name the offending line.
DatedSeries load_prices_csv(const std::filesystem::path& path);

/// Reads a `date,value` reference-index CSV.
DatedSeries load_reference_csv(const std::filesystem::path& path);

/// Reads one named column of a CSV whose first column is `date`, such as
/// an exported indicator.csv.
DatedSeries load_csv_column(const std::filesystem::path& path, const std::string& column);

/// y_t = ln(p_t / p_{t-1}), dated at the later price.
ReturnSeries log_returns(const DatedSeries& prices);

struct JoinedSeries {
  std::vector<std::string> dates;
  std::vector<double> left;
  std::vector<double> right;
  std::size_t dropped_left = 0;   // left dates without a match
  std::size_t dropped_right = 0;  // right dates without a match
};

JoinedSeries inner_join(const DatedSeries& left, const DatedSeries& right);

/// True for YYYY-MM-DD naming a real calendar day.
bool is_iso_date(const std::string& s);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace switchvol
