#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sigmove {

using Date = std::chrono::year_month_day;

// Parses a strict ISO-8601 `YYYY-MM-DD` date; nullopt on any deviation.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

/// Dated adjusted-close prices for one ticker. Parallel vectors.
///
/// A series produced by parse_price_csv always satisfies: length >= 2,
/// dates strictly increasing, every close finite and positive. Series built
/// by hand may violate these; validate_series reports how.
struct PriceSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> closes;

  std::size_t size() const noexcept { return closes.size(); }
  bool operator==(const PriceSeries&) const = default;
};

enum class ValidationErrorKind {
  too_short,
  length_mismatch,
  invalid_date,
  duplicate_date,
  non_increasing_date,
  non_positive_price,
  non_finite_price,
};

std::string_view to_string(ValidationErrorKind kind) noexcept;

struct ValidationError {
  std::size_t index;  // 0-based position in the series
  ValidationErrorKind kind;
  std::string message;
};

struct ValidationReport {
  std::size_t row_count = 0;
  std::vector<ValidationError> errors;
  bool ok = true;
};

ValidationReport validate_series(const PriceSeries& series);

// CSV with header exactly `date,adj_close`. Errors are DataError carrying the
// 1-based data row. The ticker defaults to the file stem.
PriceSeries parse_price_csv(const std::filesystem::path& path,
                            std::optional<std::string> ticker = std::nullopt);
PriceSeries parse_price_csv(std::istream& in, std::string ticker);

void write_price_csv(const PriceSeries& series, std::ostream& out);
void write_price_csv(const PriceSeries& series, const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace sigmove
