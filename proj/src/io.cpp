#include "switchvol/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "switchvol/error.hpp"

namespace switchvol {

namespace fs = std::filesystem;

bool is_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') return false;
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& row) {
  std::vector<std::string> out;
  std::size_t from = 0;
  while (true) {
    const auto comma = row.find(',', from);
    out.push_back(trim(row.substr(from, comma == std::string::npos ? std::string::npos : comma - from)));
    if (comma == std::string::npos) break;
    from = comma + 1;
  }
  return out;
}

// With `exact` the header must be exactly `date,<column>`; otherwise any
// header starting with `date` and containing the column is accepted.
DatedSeries load_dated_csv(const fs::path& path, const std::string& column, bool exact) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  const std::string where = path.string() + ":";
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::config, where + "1: empty file");
  const auto header = split_fields(trim(line));
  std::size_t col = 0;
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i] == column) col = i;
  if (header.front() != "date" || col == 0 || (exact && header.size() != 2)) {
    const std::string want = exact ? "'date," + column + "'" : "'date' first and a '" + column + "' column";
    throw Error(ErrorKind::config, where + "1: expected header " + want + ", got '" + trim(line) + "'");
  }

  DatedSeries out;
  out.source = path.string();
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_fields(row);
    const std::string at = where + std::to_string(lineno) + ": ";
    if (fields.size() != header.size())
      throw Error(ErrorKind::config, at + "expected " + std::to_string(header.size()) +
                                         " comma-separated fields, got " + std::to_string(fields.size()));
    const std::string& date = fields.front();
    const std::string& cell = fields[col];
    if (!is_iso_date(date)) throw Error(ErrorKind::config, at + "invalid date '" + date + "'");
    double v = 0.0;
    const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || r.ec != std::errc() || r.ptr != cell.data() + cell.size())
      throw Error(ErrorKind::config, at + "non-numeric value '" + cell + "'");
    if (!std::isfinite(v)) throw Error(ErrorKind::config, at + "non-finite value");
    if (!out.dates.empty()) {
      if (date == out.dates.back())
        throw Error(ErrorKind::config, at + "duplicated date " + date);
      if (date < out.dates.back())
        throw Error(ErrorKind::config, at + "dates not increasing (" + date + " after " +
                                           out.dates.back() + ")");
    }
    out.dates.push_back(date);
    out.values.push_back(v);
  }
  return out;
}

}  // namespace

DatedSeries load_prices_csv(const fs::path& path) {
  auto s = load_dated_csv(path, "price", true);
  if (s.size() < 2) throw Error(ErrorKind::config, path.string() + ": need at least two prices");
  return s;
}

DatedSeries load_reference_csv(const fs::path& path) { return load_dated_csv(path, "value", true); }

DatedSeries load_csv_column(const fs::path& path, const std::string& column) {
  return load_dated_csv(path, column, false);
}

ReturnSeries log_returns(const DatedSeries& prices) {
  if (prices.size() < 2) throw Error(ErrorKind::config, "log returns need at least two prices");
  ReturnSeries r;
  r.source = prices.source.empty() ? "log returns" : "log returns of " + prices.source;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (!(prices.values[t] > 0.0))
      throw Error(ErrorKind::config, "nonpositive price on " + prices.dates[t]);
    if (t == 0) continue;
    r.dates.push_back(prices.dates[t]);
    r.values.push_back(std::log(prices.values[t] / prices.values[t - 1]));
  }
  return r;
}

JoinedSeries inner_join(const DatedSeries& left, const DatedSeries& right) {
  JoinedSeries out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < left.size() && j < right.size()) {
    if (left.dates[i] == right.dates[j]) {
      out.dates.push_back(left.dates[i]);
      out.left.push_back(left.values[i]);
      out.right.push_back(right.values[j]);
      ++i;
      ++j;
    } else if (left.dates[i] < right.dates[j]) {
      ++out.dropped_left;
      ++i;
    } else {
      ++out.dropped_right;
      ++j;
    }
  }
  out.dropped_left += left.size() - i;
  out.dropped_right += right.size() - j;
  return out;
}

void write_text_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace switchvol
