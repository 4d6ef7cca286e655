#include "sigmove/market_data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sigmove/error.hpp"

namespace sigmove {

namespace {

bool parse_digits(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string row_message(std::string_view what, std::size_t row) {
  std::ostringstream os;
  os << what << " at row " << row;
  return os.str();
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string_view to_string(ValidationErrorKind kind) noexcept {
  switch (kind) {
    case ValidationErrorKind::too_short: return "too_short";
    case ValidationErrorKind::length_mismatch: return "length_mismatch";
    case ValidationErrorKind::invalid_date: return "invalid_date";
    case ValidationErrorKind::duplicate_date: return "duplicate_date";
    case ValidationErrorKind::non_increasing_date: return "non_increasing_date";
    case ValidationErrorKind::non_positive_price: return "non_positive_price";
    case ValidationErrorKind::non_finite_price: return "non_finite_price";
  }
  return "unknown";
}

ValidationReport validate_series(const PriceSeries& series) {
  ValidationReport report;
  report.row_count = series.closes.size();
  auto add = [&](std::size_t index, ValidationErrorKind kind, std::string message) {
    report.errors.push_back({index, kind, std::move(message)});
  };

  if (series.dates.size() != series.closes.size()) {
    std::ostringstream os;
    os << "length mismatch: " << series.dates.size() << " dates vs " << series.closes.size()
       << " closes";
    add(0, ValidationErrorKind::length_mismatch, os.str());
  }
  const std::size_t n = std::min(series.dates.size(), series.closes.size());
  if (n < 2) add(0, ValidationErrorKind::too_short, "series needs at least 2 observations");

  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    const Date& d = series.dates[i];
    if (!d.ok()) {
      add(i, ValidationErrorKind::invalid_date, "invalid calendar date at index " + std::to_string(i));
      continue;
    }
    if (i == 0 || !series.dates[i - 1].ok()) continue;
    if (d == series.dates[i - 1]) {
      add(i, ValidationErrorKind::duplicate_date,
          "duplicate date " + format_iso_date(d) + " at index " + std::to_string(i));
    } else if (d < series.dates[i - 1]) {
      add(i, ValidationErrorKind::non_increasing_date,
          "dates not strictly increasing at index " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < series.closes.size(); ++i) {
    const double c = series.closes[i];
    if (!std::isfinite(c)) {
      add(i, ValidationErrorKind::non_finite_price, "non-finite price at index " + std::to_string(i));
    } else if (c <= 0.0) {
      add(i, ValidationErrorKind::non_positive_price,
          "non-positive price at index " + std::to_string(i));
    }
  }
  report.ok = report.errors.empty();
  return report;
}

PriceSeries parse_price_csv(std::istream& in, std::string ticker) {
  PriceSeries series;
  series.ticker = std::move(ticker);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: missing header `date,adj_close`");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "date,adj_close")
    throw DataError("malformed header: expected `date,adj_close`, got `" + line + "`");

  std::size_t row = 0;
  std::size_t blank_run = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++blank_run;
      continue;
    }
    ++row;
    if (blank_run > 0) throw DataError(row_message("blank line before data", row), row);

    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw DataError(row_message("expected 2 fields", row), row);
    std::string_view view(line);
    auto date = parse_iso_date(view.substr(0, comma));
    if (!date) throw DataError(row_message("unparsable date", row), row);
    auto close = parse_number(view.substr(comma + 1));
    if (!close) throw DataError(row_message("unparsable number", row), row);
    if (!std::isfinite(*close)) throw DataError(row_message("non-finite price", row), row);
    if (*close <= 0.0) throw DataError(row_message("non-positive price", row), row);
    if (!series.dates.empty() && !(series.dates.back() < *date))
      throw DataError(row_message("dates not strictly increasing", row), row);

    series.dates.push_back(*date);
    series.closes.push_back(*close);
  }
  if (series.size() < 2)
    throw DataError("need at least 2 data rows, found " + std::to_string(series.size()));
  return series;
}

PriceSeries parse_price_csv(const std::filesystem::path& path, std::optional<std::string> ticker) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open price file: " + path.string());
  return parse_price_csv(in, ticker ? std::move(*ticker) : path.stem().string());
}

void write_price_csv(const PriceSeries& series, std::ostream& out) {
  out << "date,adj_close\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_iso_date(series.dates[i]) << ',' << format_double(series.closes[i]) << '\n';
}

void write_price_csv(const PriceSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_price_csv(series, out);
}

}  // namespace sigmove
